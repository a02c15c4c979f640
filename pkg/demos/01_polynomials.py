"""Exact polynomial arithmetic and the gcd certificate for the singular points."""
from mldegree.family import off_H_polynomials, off_H_certificate
from mldegree.polyrat import parse_polynomial, univariate_gcd, variables

x, y = variables(2)
h = x**3 * y + x + x * (1 - x) * y + x * (1 - y) * y - y
print("h_3 =", h.format(["x", "y"]))
print("dh/dx =", h.diff(0).format(["x", "y"]))

p = parse_polynomial("2*x*(1+x) + 1", ["x"])
q = parse_polynomial("x^2 + x + 1", ["x"])
print("gcd =", univariate_gcd(p, q).format(["x"]))

for m in (3, 5, 7, 9, 11):
    a, b = off_H_polynomials(m)
    print(f"m={m}: gcd({a.format(['x'])}, {b.format(['x'])}) is a unit: {off_H_certificate(m)}")
