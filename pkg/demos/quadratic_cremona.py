#!/usr/bin/env python3
"""The n = 2 case: three general points in the plane.

A codimension-2 flat of P^2 is a point, so the construction starts from
three general points and recovers the classical quadratic plane Cremona
transformation: components of degree 2, each Q_i a line through the other
two points, and an inverse of the same shape through the dual points.
"""

import sys

from veneroni import maps
from veneroni.projgeo import random_general_flats
from veneroni.scalar import FieldCtx

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
QQ = FieldCtx.rationals()

inst = random_general_flats(2, seed, QQ)
names = ["x0", "x1", "x2"]

print(f"seed {seed}: three general points of P^2, each given as (x_j, f_j)")
for f in inst.flats:
    print(f"  point {f.j}:  x{f.j} = 0,  {f.form2_poly().text(names)} = 0")

vmap = maps.build_forward_map(inst.flats, QQ)
print("\nthe three lines Q_i (degree 1, through the other two points):")
for i, q in enumerate(vmap.Q):
    print(f"  Q_{i} = {q.text(names)}")

print("\nmap components x_i * Q_i (degree 2):")
for i, c in enumerate(vmap.components):
    print(f"  v_{i} = {c.text(names)}")

inv = maps.build_inverse_map(vmap, maps.solve_b_matrix(vmap))
ynames = ["y0", "y1", "y2"]
print("\ninverse components (again degree 2, in the image coordinates):")
for i, c in enumerate(inv.inverse_components):
    print(f"  w_{i} = {c.text(ynames)}")

print("\ncomposing w after v multiplies every coordinate by Q_0*Q_1*Q_2:")
prod = vmap.Q[0] * vmap.Q[1] * vmap.Q[2]
for i in range(3):
    composed = inv.inverse_components[i].substitute(vmap.components)
    from veneroni.mpoly import Poly

    assert composed == Poly.var(i, 3, QQ.one) * prod
print(f"  verified symbolically; the common factor is {prod.text(names)}")
