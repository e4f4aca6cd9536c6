"""Pinned sign and normalization conventions.

The combinatorics implemented by this package leaves a handful of signs and
normalizations genuinely open: the order of a contracted edge relative to an
orientation, the multiplicity with which a glued isomorphism class is counted,
how invariant tensors are normalized when a graph vertex is decorated, and so
on.  Each such choice is pinned here as a module-level flag together with the
name of the *arbiter*: the identity test that fails when the flag is flipped.

Code reads the flags at call time, so tests can flip a flag, watch the arbiter
fail, and flip it back.  ``report()`` produces the machine-readable audit used
by the ``gca conventions`` command.
"""

# Sign of the i-th edge contraction in the chain differential: the contracted
# edge is moved to the front of the orientation, giving (-1)**(i-1).
# Alternative "plain" uses +1 for every edge.
CONTRACTION_SIGN = "edge_to_front"

# Position of a freshly created internal edge in the orientation of a glued
# graph.  "first" follows the defining texts; "last" is the flipped variant.
NEW_EDGE_POSITION = "first"

# Coefficient of a target isomorphism class under the bracket / self-gluing
# operators.  "ordered_cuts" counts, for the bracket, the pairs (edge e of the
# target, side order) whose cut reproduces the arguments, and for self-gluings
# the edges e whose cut reproduces the argument.  "classes_once" gives every
# target class the coefficient 1.
GLUING_MULTIPLICITY = "ordered_cuts"

# Normalization of the invariant tensor placed at a graph vertex by the
# evaluation maps: "average" over all alignments of the stored component with
# the vertex profile, "sum" without the 1/#alignments factor.
VERTEX_TENSOR_NORMALIZATION = "average"

# Internal degree of the central generators adjoined to cyclic words.
NU_DEGREE = 0

# Exponent of hbar attached by the prequantum trace map to a product of m
# trace words with total central weight b and gamma-power s.
LQT_HBAR_RULE = "m+b-1+2s"

# Sign placed in front of the n-ary structure tensor when it is transported
# to the shifted (bar) letters: "decalage" twists by (-1)**sum((n-i)*|x_i|),
# "none" uses the raw tensor.
STRUCTURE_TENSOR_SHIFT = "decalage"

# Degrees entering the Koszul sign of the cyclic rotation operator on words:
# "shifted" uses the word-letter degrees (|x|+1), "plain" the raw degrees.
CYCLIC_ROTATION_DEGREES = "shifted"


_REGISTRY = [
    {
        "flag": "CONTRACTION_SIGN",
        "pinned": "edge_to_front",
        "alternatives": ["plain"],
        "arbiter": "tests/test_conventions.py::test_contraction_sign_arbiter",
        "statement": "d**2 = 0 for the edge-contraction differential",
    },
    {
        "flag": "NEW_EDGE_POSITION",
        "pinned": "first",
        "alternatives": ["last"],
        "arbiter": "tests/test_conventions.py::test_new_edge_position_arbiter",
        "statement": "[d, self-gluing] = 0 on ribbon graph chains",
    },
    {
        "flag": "GLUING_MULTIPLICITY",
        "pinned": "ordered_cuts",
        "alternatives": ["classes_once"],
        "arbiter": "tests/test_conventions.py::test_gluing_multiplicity_arbiter",
        "statement": "Maurer-Cartan equation for the tree element",
    },
    {
        "flag": "VERTEX_TENSOR_NORMALIZATION",
        "pinned": "average",
        "alternatives": ["sum"],
        "arbiter": "tests/test_conventions.py::test_vertex_normalization_arbiter",
        "statement": "evaluating the star sum recovers the hamiltonian",
    },
    {
        "flag": "NU_DEGREE",
        "pinned": 0,
        "alternatives": [1],
        "arbiter": "tests/test_conventions.py::test_nu_degree_arbiter",
        "statement": "homogeneity of the length-one word bracket",
    },
    {
        "flag": "LQT_HBAR_RULE",
        "pinned": "m+b-1+2s",
        "alternatives": ["m+b+2s"],
        "arbiter": "tests/test_conventions.py::test_lqt_hbar_arbiter",
        "statement": "trace-map square against the graph projection",
    },
    {
        "flag": "STRUCTURE_TENSOR_SHIFT",
        "pinned": "decalage",
        "alternatives": ["none"],
        "arbiter": "tests/test_conventions.py::test_decalage_arbiter",
        "statement": "associativity fixture passes the coderivation square",
    },
    {
        "flag": "CYCLIC_ROTATION_DEGREES",
        "pinned": "shifted",
        "alternatives": ["plain"],
        "arbiter": "tests/test_conventions.py::test_rotation_degree_arbiter",
        "statement": "cyclic invariance of the sphere pairing tensor",
    },
]


def report():
    """Return the convention audit as a list of dicts, current values included."""
    out = []
    for entry in _REGISTRY:
        row = dict(entry)
        row["current"] = globals()[entry["flag"]]
        out.append(row)
    return out


def fingerprint():
    """Stable string identifying the active convention set."""
    return ";".join("%s=%s" % (e["flag"], globals()[e["flag"]]) for e in _REGISTRY)
