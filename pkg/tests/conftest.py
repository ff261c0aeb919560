import pytest

# Published gun table: kV, velocity, mass, energy, momentum, wavelength
PAPER_TABLE_1 = [
    (5, 4.19e7, 9.11e-31, 8.01e-16, 3.82e-23, 1.73e-11),
    (6, 4.59e7, 9.11e-31, 9.61e-16, 4.18e-23, 1.58e-11),
    (7, 4.96e7, 9.11e-31, 1.12e-15, 4.52e-23, 1.47e-11),
    (8, 5.30e7, 9.11e-31, 1.28e-15, 4.83e-23, 1.37e-11),
    (9, 5.63e7, 9.11e-31, 1.44e-15, 5.13e-23, 1.29e-11),
    (10, 5.93e7, 9.11e-31, 1.60e-15, 5.40e-23, 1.23e-11),
    (12, 6.50e7, 9.11e-31, 1.92e-15, 5.92e-23, 1.12e-11),
    (13, 6.76e7, 9.11e-31, 2.08e-15, 6.16e-23, 1.08e-11),
    (14, 7.02e7, 9.11e-31, 2.24e-15, 6.39e-23, 1.04e-11),
    (15, 7.26e7, 9.11e-31, 2.40e-15, 6.62e-23, 1.00e-11),
    (16, 7.50e7, 9.11e-31, 2.56e-15, 6.83e-23, 9.70e-12),
    (17, 7.73e7, 9.11e-31, 2.72e-15, 7.04e-23, 9.41e-12),
    (18, 7.96e7, 9.11e-31, 2.88e-15, 7.25e-23, 9.14e-12),
    (19, 8.17e7, 9.11e-31, 3.04e-15, 7.45e-23, 8.90e-12),
    (20, 8.39e7, 9.11e-31, 3.20e-15, 7.64e-23, 8.67e-12),
    (21, 8.59e7, 9.11e-31, 3.36e-15, 7.83e-23, 8.46e-12),
    (22, 8.80e7, 9.11e-31, 3.52e-15, 8.01e-23, 8.27e-12),
    (23, 8.99e7, 9.11e-31, 3.68e-15, 8.19e-23, 8.09e-12),
    (24, 9.19e7, 9.11e-31, 3.84e-15, 8.37e-23, 7.92e-12),
    (25, 9.38e7, 9.11e-31, 4.01e-15, 8.54e-23, 7.76e-12),
    (26, 9.56e7, 9.11e-31, 4.17e-15, 8.71e-23, 7.61e-12),
    (27, 9.75e7, 9.11e-31, 4.33e-15, 8.88e-23, 7.46e-12),
    (28, 9.92e7, 9.11e-31, 4.49e-15, 9.04e-23, 7.33e-12),
    (29, 1.01e8, 9.11e-31, 4.65e-15, 9.20e-23, 7.20e-12),
    (30, 1.03e8, 9.11e-31, 4.81e-15, 9.36e-23, 7.08e-12),
]


@pytest.fixture
def paper_table():
    return PAPER_TABLE_1
