"""Independent high-precision evaluations used to freeze expected values in
the C++ tests. Run with: python3 tests/oracles/frozen_values.py"""
from mpmath import mp, mpf, pi, sqrt, exp, log10, cos, sin

mp.dps = 40
hbar = mpf("1.054571817e-34")
kB = mpf("1.380649e-23")

# Kerr coefficient from impedance, participation, characteristic current.
Z, a, Istar, f = mpf("88.7"), mpf("0.584"), mpf("2e-6"), mpf("7.45e9")
w = 2 * pi * f
K = mpf(3) / 2 * hbar * w**3 * a / (Z * Istar**2)
print("K_reported_values_rad_s", mp.nstr(K, 20), "K/2pi_Hz", mp.nstr(K / (2 * pi), 20))

# Bridge inductance
print("L_dead", mp.nstr(mpf("179e-12") * 140 / 13, 20))
print("L_nominal", mp.nstr(mpf("179e-12") * 140 / 23, 20))
print("Jstar", mp.nstr(mpf("2e-6") / (mpf("13e-9") * mpf("4e-9")), 20))

# Bose-Einstein at 58 mK
n = 1 / (exp(hbar * w / (kB * mpf("0.058"))) - 1)
print("N_BE_58mK", mp.nstr(n, 20), "hbar w / kB", mp.nstr(hbar * w / kB, 20))

# Rayleigh-Jeans slope ratio at 608 mK
x = hbar * w / (kB * mpf("0.608"))
print("RJ slope ratio 608mK", mp.nstr(x**2 * exp(x) / (exp(x) - 1) ** 2, 20))
x = hbar * w / (kB * mpf("1.5"))
print("RJ slope ratio 1.5K", mp.nstr(x**2 * exp(x) / (exp(x) - 1) ** 2, 20))

# amplifier noise behind the chain
G = mpf(10) ** (mpf(26) / 10)
def nkpa(nadd, g, nsys, lam):
    return lam * (nadd + mpf("0.5")) - nsys / g - mpf("0.5")
print("G26", mp.nstr(G, 20))
print("N_NKPA", mp.nstr(nkpa(mpf("0.59"), G, 23, mpf("0.95")), 20))
print("band lo", mp.nstr(nkpa(mpf("0.59"), G, 25, mpf("0.92")), 20),
      "hi", mp.nstr(nkpa(mpf("0.59"), G, 21, mpf("0.98")), 20))

# Quantum limit at 26 dB
print("Nadd_ql_26dB", mp.nstr((1 - 1 / G) / 2, 20))

# Touchstone DB conversion (-0.5 dB, 170 deg)
m = mpf(10) ** (mpf("-0.5") / 20)
print("db_row", mp.nstr(m * cos(170 * pi / 180), 20), mp.nstr(m * sin(170 * pi / 180), 20))

# Reflection extinction at resonance for Q_in = 4000, kappa_tot = 58.9 MHz
ki = mpf("7.45e9") / 4000
ke = mpf("58.9e6") - ki
s = 1 - ke / ((ke + ki) / 2)
print("extinction_dB", mp.nstr(-20 * log10(abs(s)), 20))
