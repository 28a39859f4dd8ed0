from rdflib import Namespace
from rdflib.namespace import RDF
from rdflib.namespace import RDFS
from rdflib.namespace import XSD

RR = Namespace("http://www.w3.org/ns/r2rml#")
RML = Namespace("http://semweb.mmlab.be/ns/rml#")
QL = Namespace("http://semweb.mmlab.be/ns/ql#")
FNML = Namespace("http://semweb.mmlab.be/ns/fnml#")
FNO = Namespace("https://w3id.org/function/ontology#")
# older mapping documents use the http form of the function ontology
FNO_LEGACY = Namespace("http://w3id.org/function/ontology#")
GREL = Namespace("http://users.ugent.be/~bjdmeest/function/grel.ttl#")

RDF_TYPE = str(RDF.type)

__all__ = ["RR", "RML", "QL", "FNML", "FNO", "FNO_LEGACY", "GREL", "RDF", "RDFS", "XSD", "RDF_TYPE"]
