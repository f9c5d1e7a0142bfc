#!/usr/bin/env python3
"""Generate src/r_polynomials.inc.

The per-frequency linear system of the IBD pipeline is (I - B) s = g, where
B(theta) = C + D(theta) is the 4x4 one-step matrix of the two-lineage
activity chain and only the fourth column of (I - B)^{-1} is ever needed
(the source term g is supported on the both-active component).  This script
builds B symbolically, computes det(I - B) and the fourth adjugate column,
groups them as polynomials in the two migration symbols P = phat(theta),
Q = phat(eta), factors each coefficient over (m, delta, eps), and emits the
result as plain C++.

Run from the repository root:  python3 tools/gen_r_polynomials.py
The output file is committed; regeneration is only needed if the activity
chain itself changes.
"""

import sympy as sp

m, d, e, P, Q = sp.symbols("m d e P Q")


def build_b():
    """4x4 one-step matrix of the pair activity chain, Fourier side.

    Component order: 1 = both dormant, 2 = first dormant / second active,
    3 = first active / second dormant, 4 = both active.  The C part collects
    transitions in which at least one lineage enters or stays in the
    seed-bank without moving; the D part carries the migration factors P, Q
    of the lineages that move.
    """
    C = m * sp.Matrix(
        [
            [(1 - d) ** 2, (1 - d) * e, (1 - d) * e, e**2],
            [d * (1 - d), 0, d * e, 0],
            [d * (1 - d), d * e, 0, 0],
            [d**2, 0, 0, 0],
        ]
    )
    D = (
        m
        * (1 - e)
        * sp.Matrix(
            [
                [0, 0, 0, 0],
                [0, (1 - d) * Q, 0, e * Q],
                [0, 0, (1 - d) * P, e * P],
                [0, d * Q, d * P, (1 - e) * P * Q],
            ]
        )
    )
    return C + D


def coeff_lines(expr, name):
    """Group expr by P^i Q^j monomials and emit factored coefficients."""
    poly = sp.Poly(sp.expand(expr), P, Q)
    terms = sorted(poly.terms(), key=lambda t: (-t[0][0], -t[0][1]))
    lines = []
    parts = []
    for (i, j), coeff in terms:
        cname = f"c{name}_{i}{j}"
        code = sp.ccode(sp.factor(coeff))
        lines.append(f"    const qreal {cname} = {code};")
        mono = "".join(["*P" * i, "*Q" * j])
        parts.append(f"{cname}{mono}")
    body = "\n".join(lines)
    ret = " + ".join(parts)
    return f"{body}\n    return static_cast<double>({ret});"


def main():
    B = build_b()
    A = sp.eye(4) - B
    det = sp.factor(A.det())
    adj = A.adjugate()

    fns = [("r_det", det)]
    for i in range(4):
        fns.append((f"r_adj{i + 1}4", adj[i, 3]))

    out = [
        "// Generated by tools/gen_r_polynomials.py -- do not edit by hand.",
        "// det(I - B) and the fourth adjugate column of the 4x4 activity-chain",
        "// matrix, grouped by P^i Q^j with coefficients factored in (m, d, e).",
        "",
        "namespace rpoly {",
        "",
        "// Evaluation runs in extended precision: near m = 1, P = Q = 1 the",
        "// monomials cancel to a determinant many orders below their own",
        "// magnitude, and plain double evaluation would lose it entirely.",
        "#if defined(__SIZEOF_FLOAT128__)",
        "using qreal = __float128;",
        "#else",
        "using qreal = long double;",
        "#endif",
        "",
        "inline qreal pow(qreal base, int n) {",
        "    qreal r = 1;",
        "    for (int i = 0; i < n; ++i) r *= base;",
        "    return r;",
        "}",
        "",
    ]
    for fname, expr in fns:
        out.append(
            f"inline double {fname}(double m_in, double d_in, double e_in, "
            "double P_in, double Q_in) {"
        )
        out.append("    const qreal m = m_in, d = d_in, e = e_in, P = P_in, Q = Q_in;")
        out.append(coeff_lines(expr, fname[2:4]))
        out.append("}")
        out.append("")
    out.append("} // namespace rpoly")
    out.append("")

    with open("src/r_polynomials.inc", "w") as f:
        f.write("\n".join(out))
    print("wrote src/r_polynomials.inc")


if __name__ == "__main__":
    main()
