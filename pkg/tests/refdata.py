"""Frozen reference values for the benchmark plant and its published designs.

The discretization oracle is the closed form for the triangular state
matrix A = [[0, 1], [0, -a]]: e^{At} = [[1, (1 - e^{-at})/a], [0, e^{-at}]]
and the input integral follows by direct integration.  It is independent
of the package's matrix exponential.
"""
import numpy as np

# benchmark continuous plant and sampling time
PLANT_A = np.array([[0.0, 1.0], [0.0, -0.1]])
PLANT_B = np.array([[0.0], [0.1]])
PLANT_C = np.array([[1.0, 0.0]])
SAMPLE_TIME = 0.3
P_TX = 0.7


def zoh_closed_form(a: float = 0.1, b: float = 0.1, h: float = SAMPLE_TIME):
    """Independent analytic ZOH of the benchmark plant."""
    e = np.exp(-a * h)
    G = np.array([[1.0, (1.0 - e) / a], [0.0, e]])
    # integral of e^{As} ds over [0, h], times B = [0, b]'
    i12 = (h - (1.0 - e) / a) / a
    i22 = (1.0 - e) / a
    H = np.array([[i12 * b], [i22 * b]])
    return G, H


ZOH_G, ZOH_H = zoh_closed_form()

# published reference designs for this plant at 70% delivery
WEIGHTS_A = dict(q_diag=[0.29495, 1.37137], r_value=0.25781)
GAIN_A = np.array([[1.00337, 4.09011]])
WEIGHTS_B = dict(q_diag=[11.87689, 14.33702], r_value=10.58286)
GAIN_B = np.array([[0.99994, 3.73058]])

# published stability certificates (printed to four decimals)
CERT_A = dict(
    a1=1.0604, a2=0.8772,
    P=np.array([
        [27.779, 39.8478, -17.1649, -14.5208],
        [39.8478, 188.0877, -13.848, -83.083],
        [-17.1649, -13.848, 17.5084, 15.2433],
        [-14.5208, -83.083, 15.2433, 87.2639],
    ]),
    eigenvalues=np.array([1.9366, 30.6368, 42.8462, 245.2193]),
    decay=1.0017,
)
CERT_B = dict(
    a1=1.0655, a2=0.86331,
    P=np.array([
        [11.7672, 15.0175, -7.7426, -4.1701],
        [15.0175, 72.6810, -5.1676, -27.2520],
        [-7.7426, -5.1676, 7.6440, 4.2129],
        [-4.1701, -27.2520, 4.2129, 25.2804],
    ]),
    eigenvalues=np.array([0.7439, 13.1253, 14.5415, 88.9619]),
    decay=1.0004,
)
