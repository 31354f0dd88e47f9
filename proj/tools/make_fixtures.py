#!/usr/bin/env python3
"""Regenerates tests/fixtures. Independent of the C++ code: plain numpy."""

import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"
Z0 = 50.0
C0 = 299792458.0


def abcd_line(f, z, delay, loss_db_per_ns_ghz=0.0):
    """ABCD of a line with one-way delay and a sqrt(f) conductor loss."""
    alpha = loss_db_per_ns_ghz * delay * 1e9 * np.sqrt(f / 1e9) / 8.686
    gl = alpha + 1j * 2 * np.pi * f * delay
    a = np.cosh(gl)
    b = z * np.sinh(gl)
    c = np.sinh(gl) / z
    return np.array([[a, b], [c, a]]).transpose(2, 0, 1)


def abcd_shunt(y):
    one = np.ones_like(y)
    zero = np.zeros_like(y)
    return np.array([[one, zero], [y, one]]).transpose(2, 0, 1)


def abcd_to_s(m):
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    den = a + b / Z0 + c * Z0 + d
    s11 = (a + b / Z0 - c * Z0 - d) / den
    s12 = 2 * (a * d - b * c) / den
    s21 = 2 / den
    s22 = (-a + b / Z0 - c * Z0 + d) / den
    return np.array([[s11, s12], [s21, s22]]).transpose(2, 0, 1)


def write_touchstone(path, f, s, fmt="MA", unit="GHz", comment=""):
    scale = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}[unit.upper()]
    ports = s.shape[1]
    lines = [f"! {comment}"] if comment else []
    lines.append(f"# {unit} S {fmt} R 50")
    for k in range(len(f)):
        m = s[k]
        # 2-port files list S11 S21 S12 S22; larger ones are row-major.
        order = [m[0, 0], m[1, 0], m[0, 1], m[1, 1]] if ports == 2 else list(m.reshape(-1))

        def pair(v):
            if fmt == "RI":
                return f"{v.real:.12g} {v.imag:.12g}"
            if fmt == "DB":
                return f"{20 * np.log10(max(abs(v), 1e-300)):.12g} {np.degrees(np.angle(v)):.12g}"
            return f"{abs(v):.12g} {np.degrees(np.angle(v)):.12g}"

        cells = [pair(v) for v in order]
        if ports == 2:
            lines.append(f"{f[k] / scale:.12g} " + " ".join(cells))
        else:
            for r in range(ports):
                row = " ".join(cells[r * ports:(r + 1) * ports])
                lines.append((f"{f[k] / scale:.12g} " if r == 0 else "  ") + row)
    path.write_text("\n".join(lines) + "\n")


def socket_two_port():
    """Cable, a slightly low-impedance wire and a pad transition; 10 MHz to 10 GHz."""
    f = np.linspace(10e6, 10e9, 1000)
    m = abcd_line(f, 50.0, 0.35e-9, 0.02)
    m = m @ abcd_line(f, 46.0, 0.12e-9, 0.05)
    m = m @ abcd_shunt(1j * 2 * np.pi * f * 0.04e-12)
    m = m @ abcd_line(f, 52.0, 0.08e-9, 0.08)
    return f, abcd_to_s(m)


def dip_two_port():
    """Line with a lossy shunt resonance near 1.8 GHz, about 200 MHz wide."""
    f = np.linspace(1.0e9, 2.6e9, 801)
    f0, q = 1.8e9, 9.0
    w, w0 = 2 * np.pi * f, 2 * np.pi * f0
    r = 60.0
    l = q * r / w0
    c = 1 / (w0 ** 2 * l)
    z = r + 1j * w * l + 1 / (1j * w * c)
    m = abcd_line(f, 50.0, 0.3e-9, 0.02) @ abcd_shunt(1 / z) @ abcd_line(f, 50.0, 0.2e-9, 0.02)
    return f, abcd_to_s(m)


def crosstalk_four_port():
    """Two through lines (1-2 and 3-4) with weak coupling peaking at -45 dB at 6 GHz."""
    f = np.linspace(1e9, 10e9, 901)
    s = np.zeros((len(f), 4, 4), dtype=complex)
    thru = 0.97 * np.exp(-2j * np.pi * f * 0.4e-9)
    refl = 0.05 * np.exp(-2j * np.pi * f * 0.1e-9)
    base_db = -62 + 3 * np.sin(2 * np.pi * f / 2.3e9)
    bump_db = -45 - 0.2 * ((f - 6e9) / 50e6) ** 2
    xt_db = np.maximum(base_db, bump_db)
    phase = np.exp(-2j * np.pi * f * 0.25e-9)
    for (a, b) in [(0, 1), (2, 3)]:
        s[:, b, a] = s[:, a, b] = thru
        s[:, a, a] = s[:, b, b] = refl
    for (o, i, db) in [(2, 0, xt_db), (3, 0, base_db - 3.0), (2, 1, base_db - 5.0), (3, 1, base_db - 1.5)]:
        s[:, o, i] = s[:, i, o] = 10 ** (db / 20) * phase
    return f, s


def tdr_trace(rng):
    """50 ohm cable, 60 ohm section, 50 ohm load; 20 ps Gaussian edges plus noise."""
    dt = 1e-12
    t = np.arange(0.0, 2.0e-9, dt)
    v_plus = 0.25
    xi = lambda z: (z - 50.0) / (z + 50.0)
    edges = [(0.6e-9, xi(60.0)), (1.0e-9, xi(50.0) - xi(60.0))]
    sigma = 20e-12 / 2.563  # 10-90 % rise of an erf edge
    from math import erf, sqrt
    erf_v = np.vectorize(erf)
    v = np.full_like(t, v_plus)
    for (t0, dxi) in edges:
        v += v_plus * dxi * 0.5 * (1 + erf_v((t - t0) / (sqrt(2) * sigma)))
    v += rng.normal(0.0, 0.2e-3, size=t.shape)
    return t, v


def resonator_sweep(rng):
    """Notch resonator (inverse-S21 model) with cable baseline and complex noise."""
    f0, qi, qc, phi = 5064513933.0, 165790.0, 16002.0, -0.0347
    ql = 1 / (1 / qi + 1 / qc)
    f = np.linspace(f0 - 6 * f0 / ql, f0 + 6 * f0 / ql, 801)
    x = (f - f0) / f0
    inv = 1 + (qi / qc) * np.exp(1j * phi) / (1 + 2j * qi * x)
    s21 = 1 / inv
    baseline = 10 ** (-32 / 20) * np.exp(-2j * np.pi * f * 48e-9 + 0.7j) * (1 + 0.02 * (f - f0) / (f0 / ql))
    s21 = s21 * baseline
    noise = 0.002 * 10 ** (-32 / 20)
    s21 += rng.normal(0, noise, f.shape) + 1j * rng.normal(0, noise, f.shape)
    return f, s21


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20170217)

    f, s = socket_two_port()
    write_touchstone(OUT / "dut.s2p", f, s, "MA", "GHz", "cable, wire and pad transition")

    f, s = dip_two_port()
    write_touchstone(OUT / "dip.s2p", f, s, "DB", "MHz", "line with a lossy shunt resonance")

    f, s = crosstalk_four_port()
    write_touchstone(OUT / "xtalk.s4p", f, s, "RI", "Hz", "two coupled through lines")

    t, v = tdr_trace(rng)
    with open(OUT / "tdr.csv", "w") as fh:
        fh.write("time_s,volts\n")
        for a, b in zip(t, v):
            fh.write(f"{a:.6e},{b:.8e}\n")

    f, s21 = resonator_sweep(rng)
    with open(OUT / "sweep.csv", "w") as fh:
        fh.write("freq_hz,re,im\n")
        for a, b in zip(f, s21):
            fh.write(f"{a:.10e},{b.real:.10e},{b.imag:.10e}\n")

    (OUT / "bad_record.s2p").write_text("# GHz S MA R 50\n1.0 0.1 0 0.9 -10 0.9 -10\n2.0 0.1 0 0.9 x 0.9 -20 0.1 0\n")


if __name__ == "__main__":
    main()
