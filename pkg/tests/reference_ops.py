"""Naive loop implementations used as oracles for the vectorized tensor ops."""

import math

import numpy as np


def _pad_amounts(size, kernel, stride, padding):
    if padding == "valid":
        return (size - kernel) // stride + 1, 0
    out = math.ceil(size / stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return out, total // 2


def naive_conv2d(x, w, b, stride, padding, kind):
    """Seven nested loops over batch, rows, cols, out channels, kernel rows, kernel cols, in channels."""
    n, h, wd, cin = x.shape
    kh, kw = w.shape[:2]
    out_h, pad_t = _pad_amounts(h, kh, stride, padding)
    out_w, pad_l = _pad_amounts(wd, kw, stride, padding)
    cout = cin if kind == "depthwise" else w.shape[3]
    out = np.zeros((n, out_h, out_w, cout), dtype=np.float64)
    for bi in range(n):
        for oy in range(out_h):
            for ox in range(out_w):
                for co in range(cout):
                    total = float(b[co])
                    for ky in range(kh):
                        for kx in range(kw):
                            for ci in range(cin):
                                if kind == "depthwise" and ci != co:
                                    continue
                                iy = oy * stride + ky - pad_t
                                ix = ox * stride + kx - pad_l
                                if 0 <= iy < h and 0 <= ix < wd:
                                    weight = w[ky, kx, ci, 0] if kind == "depthwise" else w[ky, kx, ci, co]
                                    total += float(x[bi, iy, ix, ci]) * float(weight)
                    out[bi, oy, ox, co] = total
    return out


def naive_max_pool(x, window, stride):
    n, h, wd, c = x.shape
    out_h, pad_t = _pad_amounts(h, window, stride, "same")
    out_w, pad_l = _pad_amounts(wd, window, stride, "same")
    out = np.full((n, out_h, out_w, c), -np.inf, dtype=np.float32)
    for bi in range(n):
        for oy in range(out_h):
            for ox in range(out_w):
                for ch in range(c):
                    for ky in range(window):
                        for kx in range(window):
                            iy = oy * stride + ky - pad_t
                            ix = ox * stride + kx - pad_l
                            if 0 <= iy < h and 0 <= ix < wd:
                                out[bi, oy, ox, ch] = max(out[bi, oy, ox, ch], x[bi, iy, ix, ch])
    return out


def matmul_pointwise(x, w, b):
    """A 1x1 convolution as one matrix product over flattened pixels."""
    n, h, wd, cin = x.shape
    flat = x.reshape(-1, cin).astype(np.float64) @ w[0, 0].astype(np.float64) + b
    return flat.reshape(n, h, wd, -1)


def scalar_add(a, b):
    out = np.empty_like(a)
    for index in np.ndindex(a.shape):
        out[index] = a[index] + b[index]
    return out


def bilinear_sample(pixels, out_size, y, x):
    """Hand bilinear interpolation of output pixel (y, x) with half-pixel centers."""
    in_h, in_w = pixels.shape[:2]

    def coord(v, in_size):
        src = (v + 0.5) * in_size / out_size - 0.5
        src = min(max(src, 0.0), in_size - 1)
        lo = int(math.floor(src))
        return lo, min(lo + 1, in_size - 1), src - lo

    y0, y1, fy = coord(y, in_h)
    x0, x1, fx = coord(x, in_w)
    p = pixels.astype(np.float64)
    top = p[y0, x0] * (1 - fx) + p[y0, x1] * fx
    bottom = p[y1, x0] * (1 - fx) + p[y1, x1] * fx
    return top * (1 - fy) + bottom * fy
