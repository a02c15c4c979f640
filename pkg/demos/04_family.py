"""Full check of the V_m family for a few odd m."""
import sys

from mldegree.family import verify_family
from mldegree.solver import TrackerConfig

ms = [int(a) for a in sys.argv[1:]] or [1, 3, 5]
for m in ms:
    rep = verify_family(m, TrackerConfig(), draws=3)
    print(f"m={m}: MLdeg {rep.mldeg_Vm}, chi {rep.chi_Vm}, chi_IC {rep.chi_IC_Vm}, "
          f"gap {rep.gap}, ok {rep.ok}")
