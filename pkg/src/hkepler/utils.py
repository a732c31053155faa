from __future__ import annotations

import math
import os
from typing import Callable
import numpy as np
from .constants import FD_BASE_STEP, SAMPLE_R_RANGE, SAMPLE_Z_RANGE, SAMPLE_P_RANGE
from .geometry import CylState


class Utils:

    @staticmethod
    def get_current_directory() -> str:
        """Get the current directory path

        :return: directory path
        """

        return os.path.dirname(os.path.realpath(__file__))

    @staticmethod
    def fd_step(value: float) -> float:
        """Get the central-difference step for a coordinate value

        :param value: coordinate value the derivative is taken at
        :return: step size cbrt(eps) * max(1, |value|)
        """

        return FD_BASE_STEP * max(1.0, abs(value))

    @staticmethod
    def central_difference(fn: Callable[[float], float], x: float, h: float | None = None) -> float:
        """Approximate fn'(x) with a central difference

        :param fn: scalar function
        :param x: evaluation point
        :param h: step (None to use the default scaled step)
        :return: derivative estimate
        """

        if h is None:
            h = Utils.fd_step(x)
        return (fn(x + h) - fn(x - h)) / (2 * h)

    @staticmethod
    def gradient(fn: Callable[[np.ndarray], float], point) -> np.ndarray:
        """Central-difference gradient of a function of several variables

        :param fn: function taking a 1-D array
        :param point: evaluation point
        :return: array of partial derivatives
        """

        point = np.asarray(point, dtype=float)
        result = np.empty(point.size)

        for i in range(point.size):
            h = Utils.fd_step(point[i])
            forward = point.copy()
            backward = point.copy()
            forward[i] += h
            backward[i] -= h
            result[i] = (fn(forward) - fn(backward)) / (2 * h)
        return result

    @staticmethod
    def state_gradient(fn: Callable[[CylState], float], s: CylState) -> np.ndarray:
        """Partials of a state function with respect to (r, θ, z, p_R, p_S)

        :param fn: function of a cylindrical state
        :param s: state to differentiate at
        :return: array of five partial derivatives
        """

        return Utils.gradient(lambda values: fn(CylState.from_array(values)), s.to_array())

    @staticmethod
    def random_admissible_state(rng: np.random.Generator) -> CylState:
        """Draw a state from the sampling box used by the property checks

        :param rng: numpy random generator
        :return: cylindrical state away from the axis and the origin
        """

        return CylState(
            float(rng.uniform(*SAMPLE_R_RANGE)),
            float(rng.uniform(-math.pi, math.pi)),
            float(rng.uniform(*SAMPLE_Z_RANGE)),
            float(rng.uniform(*SAMPLE_P_RANGE)),
            float(rng.uniform(*SAMPLE_P_RANGE)),
        )

    @staticmethod
    def random_admissible_states(rng: np.random.Generator, count: int) -> list[CylState]:
        return [Utils.random_admissible_state(rng) for _ in range(count)]
