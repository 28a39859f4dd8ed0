from .engine import IntermediateNode
from .engine import MappingJob
from .engine import OutputFormat
from .engine import build_nodes
from .engine import run_job
from .functions import FunctionRegistry
from .functions import default_registry
from .isomorphism import isomorphic
from .mapping_parser import parse_mapping_document
from .mapping_parser import resolve_roots
from .rdf import RDFTerm
from .rdf import Triple
from .rdf import TripleSet
from .serializers import serialize_jsonld
from .serializers import serialize_ntriples
from .validation import validate

__version__ = "0.1.0"
