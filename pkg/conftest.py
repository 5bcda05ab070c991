# Test wiring: keep doctest output stable across NumPy versions
# (NumPy >= 2 reprs scalars as np.float64(...)).
import numpy

try:
    numpy.set_printoptions(legacy='1.25')
except (TypeError, ValueError):
    pass
