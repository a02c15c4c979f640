"""ML degree of a few smooth models, and the signed Euler characteristic."""
from mldegree.family import build_U
from mldegree.likelihood import IMPLICIT, euler_char_smooth, hyperplane_model, ml_degree
from mldegree.solver import TrackerConfig

cfg = TrackerConfig()
for n in range(2, 6):
    rep = ml_degree(hyperplane_model(n), cfg, draws=3)
    print(f"hyperplane n={n}: MLdeg {rep.count}, per draw {rep.per_draw_counts}")

u = build_U(IMPLICIT)
rep = ml_degree(u, cfg, draws=3)
print("U: MLdeg", rep.count, "chi", euler_char_smooth(u, 2, cfg, 3))
