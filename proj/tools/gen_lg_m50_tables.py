#!/usr/bin/env python3
"""Regenerates the tabulated sections of data/lg_m50.params.

OCP fits: graphite-SiOx negative and NMC811 positive of the LG M50 cell
(Chen et al., J. Electrochem. Soc. 167 (2020) 080534). Electrolyte
diffusivity: LiPF6 in EC:EMC (Nyman et al. 2008).
"""
import numpy as np


def ocp_neg(x):
    return (1.9793 * np.exp(-39.3631 * x) + 0.2482
            - 0.0909 * np.tanh(29.8538 * (x - 0.1234))
            - 0.04478 * np.tanh(14.9159 * (x - 0.2769))
            - 0.0205 * np.tanh(30.4444 * (x - 0.6103)))


def ocp_pos(y):
    return (-0.8090 * y + 4.4875
            - 0.0428 * np.tanh(18.5138 * (y - 0.5542))
            - 17.7326 * np.tanh(15.789 * (y - 0.3117))
            + 17.5842 * np.tanh(15.9308 * (y - 0.3120)))


def diffusivity(c):
    m = c / 1000.0
    return 8.794e-11 * m * m - 3.972e-10 * m + 4.862e-10


def table(name, xs, ys, header):
    out = [f"[{name}]", f"# {header}"]
    out += [f"{x:.6f} {y:.9e}" for x, y in zip(xs, ys)]
    return "\n".join(out)


if __name__ == "__main__":
    xn = np.unique(np.round(np.concatenate([np.linspace(0.0, 0.05, 26),
                                            np.linspace(0.05, 1.0, 96)]), 6))
    yp = np.round(np.linspace(0.0, 1.0, 101), 6)
    ce = np.linspace(0.0, 4000.0, 41)
    print(table("ocp_negative", xn, ocp_neg(xn), "stoichiometry  potential_V"))
    print()
    print(table("ocp_positive", yp, ocp_pos(yp), "stoichiometry  potential_V"))
    print()
    print(table("electrolyte_diffusivity", ce, diffusivity(ce),
                "concentration_mol_m3  bulk_diffusivity_m2_s"))
