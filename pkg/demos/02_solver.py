"""Total-degree homotopy on a small dense system."""
import numpy as np

from mldegree.polyrat import COMPLEX, variables
from mldegree.solver import SquareSystem, TrackerConfig, solve_square

x, y = variables(2, COMPLEX)
system = SquareSystem([x**2 + y**2 - 5, x * y - 2])
sol = solve_square(system, TrackerConfig(seed=1))
print("Bezout count:", sol.bezout_count)
print("path results:", sol.path_results)
for s in sol.solutions:
    print(np.round(s.point, 10), s.multiplicity_flag)
