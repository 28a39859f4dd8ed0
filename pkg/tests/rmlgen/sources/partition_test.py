"""
Evaluating a child iterator below each parent node must select exactly the
nodes the absolute child iterator selects from the root.
"""
import json
import random
from collections import Counter

import pytest
from lxml import etree

from rmlgen.errors import NotAPrefix
from rmlgen.sources import ReferenceFormulation
from rmlgen.sources import SourceFormat
from rmlgen.sources import compute_relative_iterator
from rmlgen.sources import evaluate_path
from rmlgen.sources import load_source
from rmlgen.sources import path_expression

NAMES = ("a", "b", "c")


def random_json(rng: random.Random, depth: int = 0):
    if depth >= 4 or rng.random() < 0.2:
        return rng.choice([rng.randint(0, 99), "x", True, None])

    if rng.random() < 0.5:
        return [random_json(rng, depth + 1) for _ in range(rng.randint(0, 3))]

    return {name: random_json(rng, depth + 1) for name in rng.sample(NAMES, rng.randint(0, 3))}


def random_json_steps(rng: random.Random, count: int) -> str:
    return "".join(rng.choice([f".{rng.choice(NAMES)}", ".*", "[*]", f"[{rng.randint(0, 2)}]"]) for _ in range(count))


def random_xml(rng: random.Random, parent, depth: int = 0) -> None:
    if depth >= 4:
        return

    for _ in range(rng.randint(0, 3)):
        child = etree.SubElement(parent, rng.choice(NAMES))
        if rng.random() < 0.5:
            child.set("id", str(rng.randint(0, 99)))
        if rng.random() < 0.3:
            child.text = f"t{rng.randint(0, 9)}"
        else:
            random_xml(rng, child, depth + 1)


def random_xml_steps(rng: random.Random, count: int) -> list[str]:
    return [rng.choice([*NAMES, "*", f"{rng.choice(NAMES)}[{rng.randint(1, 2)}]"]) for _ in range(count)]


def partition_holds(root, formulation: ReferenceFormulation, parent_text: str, child_text: str) -> None:
    parent = path_expression(formulation, parent_text)
    child = path_expression(formulation, child_text)
    relative = compute_relative_iterator(parent, child)

    partitioned = Counter(
        node.document_order_index for scope in evaluate_path(root, parent) for node in evaluate_path(scope, relative)
    )
    absolute = Counter(node.document_order_index for node in evaluate_path(root, child))

    assert partitioned == absolute, f"{parent_text} -> {child_text}"


@pytest.mark.parametrize("seed", range(200))
def test_json_partition(tmp_path, seed):
    rng = random.Random(seed)
    path = tmp_path / "tree.json"
    path.write_text(json.dumps({name: random_json(rng, 1) for name in NAMES}), encoding="utf-8")
    document = load_source(path, SourceFormat.JSON)

    parent = "$" + random_json_steps(rng, rng.randint(0, 2))
    child = parent + random_json_steps(rng, rng.randint(0, 2))

    partition_holds(document.root, ReferenceFormulation.JSONPATH, parent, child)


@pytest.mark.parametrize("seed", range(100))
def test_xml_partition(tmp_path, seed):
    rng = random.Random(seed)
    root = etree.Element("r")
    random_xml(rng, root)
    path = tmp_path / "tree.xml"
    path.write_bytes(etree.tostring(root, xml_declaration=True, encoding="UTF-8"))
    document = load_source(path, SourceFormat.XML)

    parent_steps = ["r", *random_xml_steps(rng, rng.randint(0, 2))]
    child_steps = parent_steps + random_xml_steps(rng, rng.randint(0, 2))
    if rng.random() < 0.3:
        child_steps.append(rng.choice(["@id", "text()"]))

    partition_holds(document.root, ReferenceFormulation.XPATH, "/" + "/".join(parent_steps), "/" + "/".join(child_steps))


def test_partition_needs_a_prefix():
    with pytest.raises(NotAPrefix):
        compute_relative_iterator(
            path_expression(ReferenceFormulation.JSONPATH, "$.a.b"),
            path_expression(ReferenceFormulation.JSONPATH, "$.a.c.b"),
        )
