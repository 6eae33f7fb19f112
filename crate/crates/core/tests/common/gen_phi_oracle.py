# Regenerates phi_oracle.csv: phi_0..phi_3 at 100-digit precision.
# Columns: re(z), im(z), then re/im of phi_0..phi_3, all as repr of doubles.
import mpmath as mp

mp.mp.dps = 100


def phis(z):
    out = [mp.exp(z)]
    for k in range(3):
        out.append((out[-1] - 1 / mp.factorial(k)) / z)
    return out


def series(z, k, terms=200):
    return mp.fsum(z**j / mp.factorial(j + k) for j in range(terms))


angles = [mp.pi, 0, mp.pi / 2, 3 * mp.pi / 4, mp.pi / 4, 0.9 * mp.pi]
radii = [mp.mpf(10) ** (mp.mpf(e) / 4) for e in range(-32, 9)]
rows = []
for a in angles:
    for r in radii:
        re, im = float(r * mp.cos(a)), float(r * mp.sin(a))
        re = 0.0 if abs(re) < 1e-14 * r else re
        im = 0.0 if abs(im) < 1e-14 * r else im
        z = mp.mpc(re, im)
        ps = phis(z)
        if abs(z) < 1:
            for k in range(4):
                assert abs(ps[k] - series(z, k)) < mp.mpf(10) ** -60 * abs(ps[k])
        cols = [repr(float(z.real)), repr(float(z.imag))]
        for p in ps:
            cols += [repr(float(p.real)), repr(float(p.imag))]
        rows.append(",".join(cols))

with open("phi_oracle.csv", "w") as f:
    f.write("re_z,im_z,re_phi0,im_phi0,re_phi1,im_phi1,re_phi2,im_phi2,re_phi3,im_phi3\n")
    f.write("\n".join(rows) + "\n")
