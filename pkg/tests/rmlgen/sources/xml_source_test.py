import pytest

from rmlgen.errors import FormatMismatch
from rmlgen.errors import NotAPrefix
from rmlgen.errors import SourceParseError
from rmlgen.errors import UnsupportedPathFeature
from rmlgen.sources import ReferenceFormulation
from rmlgen.sources import SourceFormat
from rmlgen.sources import compute_relative_iterator
from rmlgen.sources import evaluate_path
from rmlgen.sources import extract_values
from rmlgen.sources import load_source
from rmlgen.sources import path_expression
from rmlgen.sources.xml_source import compile_xpath

STUDENTS = """<?xml version="1.0" encoding="UTF-8"?>
<Students>
  <Student id="s1">
    <Name>Venus</Name>
    <Hobbies>
      <Hobby>Tennis</Hobby>
      <Hobby>Chess</Hobby>
    </Hobbies>
  </Student>
  <Student id="s2">
    <Name>Fernando</Name>
    <Bio>Drives <b>fast</b> cars</Bio>
    <Hobbies>
      <Hobby>Karting</Hobby>
    </Hobbies>
  </Student>
</Students>
"""


def xpath(text):
    return path_expression(ReferenceFormulation.XPATH, text)


def write(tmp_path, text, name="data.xml"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8") if isinstance(text, str) else text)
    return path


@pytest.fixture
def students(tmp_path):
    return load_source(write(tmp_path, STUDENTS), SourceFormat.XML)


def test_load_students(students):
    assert students.format is SourceFormat.XML
    assert students.root.kind == "element"
    assert len(evaluate_path(students.root, xpath("/Students/Student"))) == 2


def test_load_corpus_students(corpus_dir):
    document = load_source(corpus_dir / "RMLTC0009a-XML" / "students.xml", SourceFormat.XML)

    assert len(evaluate_path(document.root, xpath("/students/student"))) == 2


def test_load_invalid_xml_reports_offset(tmp_path):
    with pytest.raises(SourceParseError) as exc_info:
        load_source(write(tmp_path, "<a>\n  <b>\n</a>"), SourceFormat.XML)

    assert exc_info.value.offset is not None


def test_load_json_declared_as_xml(tmp_path):
    with pytest.raises(FormatMismatch):
        load_source(write(tmp_path, '{"a": 1}'), SourceFormat.XML)


def test_load_rejects_other_encodings(tmp_path):
    text = '<?xml version="1.0" encoding="ISO-8859-1"?>\n<a>caf\xe9</a>'

    with pytest.raises(SourceParseError) as exc_info:
        load_source(write(tmp_path, text.encode("iso-8859-1")), SourceFormat.XML)

    assert "ISO-8859-1" in str(exc_info.value)


def test_extract_element_attribute_and_text(students):
    first, second = evaluate_path(students.root, xpath("/Students/Student"))

    assert extract_values(first, "Name") == ["Venus"]
    assert extract_values(first, "@id") == ["s1"]
    assert extract_values(first, "Name/text()") == ["Venus"]
    assert extract_values(first, "Hobbies/Hobby") == ["Tennis", "Chess"]
    assert extract_values(first, "Nickname") == []
    assert extract_values(second, "Bio") == ["Drives fast cars"]


def test_positional_predicate(students):
    first = evaluate_path(students.root, xpath("/Students/Student"))[0]

    assert extract_values(first, "Hobbies/Hobby[2]") == ["Chess"]


def test_wildcard_keeps_document_order(students):
    first = evaluate_path(students.root, xpath("/Students/Student"))[0]
    children = evaluate_path(first, xpath("*"))

    assert [node.element.tag for node in children] == ["Name", "Hobbies"]
    assert [node.document_order_index for node in children] == sorted(
        node.document_order_index for node in children
    )


def test_document_order_across_kinds(students):
    student = evaluate_path(students.root, xpath("/Students/Student"))[0]
    [attribute] = evaluate_path(student, xpath("@id"))
    [name] = evaluate_path(student, xpath("Name"))
    [text] = evaluate_path(name, xpath("text()"))

    assert student.document_order_index < attribute.document_order_index < name.document_order_index
    assert name.document_order_index < text.document_order_index


def test_self_reference(students):
    name = evaluate_path(students.root, xpath("/Students/Student/Name"))[0]

    assert evaluate_path(name, xpath(".")) == [name]
    assert extract_values(name, ".") == ["Venus"]


@pytest.mark.parametrize("text", ["//Student", "/Students/Student[@id='s1']", "count(/Students)", "ancestor::x"])
def test_unsupported_xpath(text):
    with pytest.raises(UnsupportedPathFeature):
        compile_xpath(text)


def test_relative_iterator_for_hobbies(students):
    parent = xpath("/Students/Student")
    child = xpath("/Students/Student/Hobbies/Hobby")
    relative = compute_relative_iterator(parent, child)

    assert relative.text == "Hobbies/Hobby"

    partitioned = [
        node.document_order_index
        for scope in evaluate_path(students.root, parent)
        for node in evaluate_path(scope, relative)
    ]
    absolute = [node.document_order_index for node in evaluate_path(students.root, child)]

    assert partitioned == absolute


def test_relative_iterator_mixed_formulations():
    with pytest.raises(NotAPrefix):
        compute_relative_iterator(xpath("/a"), path_expression(ReferenceFormulation.JSONPATH, "$.a"))


def test_relative_iterator_diverging_paths():
    with pytest.raises(NotAPrefix):
        compute_relative_iterator(xpath("/students/student"), xpath("/sports/sport"))
