"""Explicit rational-function moments for bundles of up to three photons.

These are the expanded forms of the general sums for small N.  They serve as
a third, hand-written route next to the sum and exp-polynomial pipelines.
Arguments may be Fractions, in which case the results are exact.
"""
from __future__ import annotations

__all__ = ["mean_forms", "second_moment_forms", "cross_form_two"]


def mean_forms(g, G) -> dict:
    """{(N, k): <t_k>} for 1 <= k <= N <= 3."""
    return {
        (1, 1): (g * g + 4 * g * G + G * G) / (G * g * (G + g)),
        (2, 1): (3 * g**4 + 31 * g**3 * G + 64 * g**2 * G**2 + 31 * g * G**3 + 3 * G**4)
        / (2 * G * g * (G + g) * (G + 3 * g) * (3 * G + g)),
        # single power of (g + G) in the denominator
        (2, 2): 3 * (3 * g**4 + 19 * g**3 * G + 40 * g**2 * G**2 + 19 * g * G**3 + 3 * G**4)
        / (2 * G * g * (g + G) * (3 * g + G) * (g + 3 * G)),
        (3, 1): (10 * g**6 + 177 * g**5 * G + 800 * g**4 * G**2 + 1298 * g**3 * G**3 + 800 * g**2 * G**4 + 177 * g * G**5 + 10 * G**6)
        / (3 * G * g * (G + g) * (G + 2 * g) * (2 * G + g) * (5 * G + g) * (G + 5 * g)),
        (3, 2): (
            150 * g**8 + 2345 * g**7 * G + 14493 * g**6 * G**2 + 41371 * g**5 * G**3 + 58786 * g**4 * G**4
            + 41371 * g**3 * G**5 + 14493 * g**2 * G**6 + 2345 * g * G**7 + 150 * G**8
        )
        / (6 * G * g * (G + g) * (2 * G + g) * (G + 2 * g) * (3 * G + g) * (G + 3 * g) * (5 * G + g) * (G + 5 * g)),
        (3, 3): (
            330 * g**8 + 4511 * g**7 * G + 23979 * g**6 * G**2 + 65053 * g**5 * G**3 + 91918 * g**4 * G**4
            + 65053 * g**3 * G**5 + 23979 * g**2 * G**6 + 4511 * g * G**7 + 330 * G**8
        )
        / (6 * G * g * (g + G) * (2 * g + G) * (3 * g + G) * (5 * g + G) * (g + 2 * G) * (g + 3 * G) * (g + 5 * G)),
    }


def second_moment_forms(g, G) -> dict:
    """{(N, k): <t_k^2>} for 1 <= k <= N <= 2."""
    den2 = 2 * g * g * G * G * (g + G) ** 2 * (3 * g + G) ** 2 * (g + 3 * G) ** 2
    return {
        (1, 1): 2 * (g**4 + 5 * g * G**3 + 12 * g * g * G * G + 5 * g**3 * G + G**4) / (g * g * G * G * (g + G) ** 2),
        (2, 1): (
            9 * g**8 + 132 * g**7 * G + 886 * g**6 * G**2 + 2636 * g**5 * G**3 + 3810 * g**4 * G**4
            + 2636 * g**3 * G**5 + 886 * g**2 * G**6 + 132 * g * G**7 + 9 * G**8
        )
        / den2,
        (2, 2): (
            63 * g**8 + 708 * g**7 * G + 3322 * g**6 * G**2 + 8684 * g**5 * G**3 + 12462 * g**4 * G**4
            + 8684 * g**3 * G**5 + 3322 * g**2 * G**6 + 708 * g * G**7 + 63 * G**8
        )
        / den2,
    }


def cross_form_two(g, G):
    """<t_1 t_2> of a fully detected pair."""
    return (G * G + 4 * G * g + g * g) ** 2 / (G * G * (G + g) ** 2 * g * g)
