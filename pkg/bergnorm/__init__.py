from . import (
    common, parallel, yaml, logging, specfun, zonal, quadrature, kernels,
    integrals, bounds, operators, verify, reports, cli,
)

__version__ = '0.1.0'
