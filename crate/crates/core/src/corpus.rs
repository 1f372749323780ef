//! Built-in example documents, valid and deliberately invalid.

/// What running the designated command on an entry should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    /// Valid; (h0, h1, h2) of the deformation complex.
    Valid { h: (usize, usize, usize) },
    /// `command` fails with error class `kind` and exit code `exit`.
    Invalid { command: &'static str, kind: &'static str, exit: i32 },
}

#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
    pub expect: Expectation,
}

impl Entry {
    pub fn is_valid(&self) -> bool {
        matches!(self.expect, Expectation::Valid { .. })
    }
}

pub fn entries() -> &'static [Entry] {
    ENTRIES
}

pub fn get(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

const fn valid(name: &'static str, description: &'static str, text: &'static str, h: (usize, usize, usize)) -> Entry {
    Entry { name, description, text, expect: Expectation::Valid { h } }
}

const fn invalid(
    name: &'static str,
    description: &'static str,
    text: &'static str,
    command: &'static str,
    kind: &'static str,
    exit: i32,
) -> Entry {
    Entry { name, description, text, expect: Expectation::Invalid { command, kind, exit } }
}

static ENTRIES: &[Entry] = &[
    valid(
        "hyperbolic-p1",
        "O + O on P^1 with the hyperbolic symmetric form",
        "\
# O + O on P^1, hyperbolic symmetric form
ambient_dim = 1
sign = +

[level 0]
twists = 0, 0

[pairing]
  | 0, 1 |
  | 1, 0 |
",
        (1, 0, 0),
    ),
    valid(
        "symplectic-p1",
        "O + O on P^1 with the standard symplectic form",
        "\
# O + O on P^1, standard symplectic form
ambient_dim = 1
sign = -

[level 0]
twists = 0, 0

[pairing]
  | 0, 1 |
  | -1, 0 |
",
        (3, 0, 0),
    ),
    valid(
        "hyperbolic-p2",
        "O + O on P^2 with the hyperbolic symmetric form",
        "\
# O + O on P^2, hyperbolic symmetric form
ambient_dim = 2
sign = +

[level 0]
twists = 0, 0

[pairing]
  | 0, 1 |
  | 1, 0 |
",
        (1, 0, 0),
    ),
    valid(
        "symplectic-p2",
        "O + O on P^2 with the standard symplectic form",
        "\
# O + O on P^2, standard symplectic form
ambient_dim = 2
sign = -

[level 0]
twists = 0, 0

[pairing]
  | 0, 1 |
  | -1, 0 |
",
        (3, 0, 0),
    ),
    valid(
        "symplectic-split-p1",
        "O(1) + O(-1) on P^1, symplectic; h1 = 1 but the class is not global",
        "\
# O(1) + O(-1) on P^1, symplectic
ambient_dim = 1
sign = -

[level 0]
twists = 1, -1

[pairing]
  | 0, 1 |
  | -1, 0 |
",
        (4, 1, 0),
    ),
    valid(
        "symplectic-split-p1-resolved",
        "O(1) + O(-1) on P^1 with O(1) presented as O^2 / O(-1); h1 = 1, realizable",
        "\
# O(1) + O(-1) on P^1, symplectic, with O(1) = coker(O(-1) -> O^2)
ambient_dim = 1
sign = -

[level 0]
twists = 0, 0, -1

[level -1]
twists = -1
differential =
  | x1 |
  | -x0 |
  | 0 |

[pairing]
  | 0, 0, x0 |
  | 0, 0, x1 |
  | -x0, -x1, 0 |
",
        (4, 1, 0),
    ),
    valid(
        "symplectic-split-p2",
        "O(2) + O(-2) on P^2, symplectic; h2 = 3",
        "\
# O(2) + O(-2) on P^2, symplectic
ambient_dim = 2
sign = -

[level 0]
twists = 2, -2

[pairing]
  | 0, 1 |
  | -1, 0 |
",
        (16, 0, 3),
    ),
    valid(
        "ideal-point-p2",
        "ideal sheaf of the point (0:0:1) on P^2 with the multiplication pairing",
        "\
# I_p for p = (0:0:1) on P^2: O(-2) -> O(-1)^2 -> I_p -> 0,
# symmetric pairing (a, b) -> a * b
ambient_dim = 2
sign = +

[level 0]
twists = -1, -1

[level -1]
twists = -2
differential =
  | x1 |
  | -x0 |

[pairing]
  | x0^2, x0*x1 |
  | x0*x1, x1^2 |
",
        (0, 2, 3),
    ),
    valid(
        "ideal-point-p2-padded",
        "ideal-point-p2 with an acyclic O(-3) -> O(-3) summand added to the resolution",
        "\
# I_p on P^2, resolution padded by the acyclic O(-3) -id-> O(-3)
ambient_dim = 2
sign = +

[level 0]
twists = -1, -1, -3

[level -1]
twists = -2, -3
differential =
  | x1, 0 |
  | -x0, 0 |
  | 0, 1 |

[pairing]
  | x0^2, x0*x1, 0 |
  | x0*x1, x1^2, 0 |
  | 0, 0, 0 |
",
        (0, 2, 3),
    ),
    invalid(
        "invalid-parse",
        "malformed polynomial in the pairing",
        "\
# the pairing entry 'x0^' is not a polynomial
ambient_dim = 2
sign = +

[level 0]
twists = -1, -1

[level -1]
twists = -2
differential =
  | x1 |
  | -x0 |

[pairing]
  | x0^, x0*x1 |
  | x0*x1, x1^2 |
",
        "check",
        "ParseError",
        1,
    ),
    invalid(
        "invalid-degree",
        "pairing entry of the wrong degree",
        "\
# entry (0, 0) must be a constant on O + O
ambient_dim = 1
sign = +

[level 0]
twists = 0, 0

[pairing]
  | x0, 1 |
  | 1, 0 |
",
        "check",
        "DegreeMismatch",
        2,
    ),
    invalid(
        "invalid-complex",
        "resolution whose differentials do not compose to zero",
        "\
# d_-1 o d_-2 = x0 * x1 != 0
ambient_dim = 1
sign = +

[level 0]
twists = 0

[level -1]
twists = -1
differential =
  | x1 |

[level -2]
twists = -2
differential =
  | x0 |

[pairing]
  | 1 |
",
        "check",
        "NotAComplex",
        2,
    ),
    invalid(
        "invalid-symmetry",
        "antisymmetric pairing declared symmetric",
        "\
# antisymmetric matrix with sign +
ambient_dim = 1
sign = +

[level 0]
twists = 0, 0

[pairing]
  | 0, 1 |
  | -1, 0 |
",
        "check",
        "SymmetryFailure",
        2,
    ),
    invalid(
        "invalid-descent",
        "symmetric pairing on the I_p resolution that does not descend",
        "\
# diag(x0^2, x1^2) does not kill the relation (x1, -x0)
ambient_dim = 2
sign = +

[level 0]
twists = -1, -1

[level -1]
twists = -2
differential =
  | x1 |
  | -x0 |

[pairing]
  | x0^2, 0 |
  | 0, x1^2 |
",
        "check",
        "DescentFailure",
        2,
    ),
    invalid(
        "invalid-degenerate",
        "zero pairing",
        "\
# the zero form is symmetric and descends but is degenerate
ambient_dim = 1
sign = +

[level 0]
twists = 0, 0

[pairing]
  | 0, 0 |
  | 0, 0 |
",
        "check",
        "Degenerate",
        2,
    ),
    invalid(
        "invalid-window",
        "explicit Cech window too small for the twists involved",
        "\
# O(2) + O(-2) on P^1 needs a window of at least 3; 1 is unstable
ambient_dim = 1
sign = -
window = 1

[level 0]
twists = 2, -2

[pairing]
  | 0, 1 |
  | -1, 0 |
",
        "report",
        "Unstable",
        3,
    ),
];
