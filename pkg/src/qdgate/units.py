"""Unit system: energies in meV, times in ps, lengths in nm."""

HBAR = 0.6582119569  # meV ps
K_B = 0.08617333  # meV / K

EV_TO_MEV = 1.0e3
CM_PER_S_TO_NM_PER_PS = 1.0e-5
# 1 g/cm^3 = 1e3 kg/m^3 and 1 kg/m^3 = 6.241509074 meV ps^2 / nm^5
G_PER_CM3_TO_INTERNAL = 6.241509074e3
