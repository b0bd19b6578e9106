"""Numerical laboratory for the 1D viscous Hamilton-Jacobi problem
u_t - u_xx = a |u_x|^p with homogeneous Dirichlet boundary conditions.

Subpackage map:

* ``domain``    -- grids, grid functions, norms, quadrature, heat eigenpair
* ``heat``      -- Dirichlet heat semigroup (spectral + Crank-Nicolson)
* ``solver``    -- IMEX monotone finite-difference solver and trajectories
* ``spectral``  -- mixed-boundary eigenproblem on (0,1), decay exponent r1(a)
* ``exact``     -- closed-form oracles (Cole-Hopf, stationary, envelopes)
* ``analysis``  -- rate fitting, extinction detection, bound checks
* ``profiles``  -- named initial data used by the CLI and the test corpus
* ``verify``    -- the acceptance matrix driven by ``hjdecay verify``
* ``cli``       -- command-line front door
"""

__version__ = "0.1.0"
