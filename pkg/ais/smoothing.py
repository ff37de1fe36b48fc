"""Separable gaussian smoothing with reflect padding"""

import math

import numpy as np
from scipy import ndimage


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalised 1-D kernel with radius ceil(3 * sigma)"""
    radius = max(int(math.ceil(3.0 * sigma)), 1)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return kernel / kernel.sum()


def smooth(plane: np.ndarray, sigma: float) -> np.ndarray:
    """Two-pass separable convolution; sigma 0 returns the plane unchanged"""
    if sigma <= 0:
        return np.asarray(plane, dtype=np.float32)
    kernel = gaussian_kernel(sigma)
    out = ndimage.correlate1d(np.asarray(plane, dtype=np.float64), kernel, axis=0, mode="reflect")
    out = ndimage.correlate1d(out, kernel, axis=1, mode="reflect")
    return np.clip(out, 0.0, 1.0).astype(np.float32)
