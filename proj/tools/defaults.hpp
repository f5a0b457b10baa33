#pragma once

namespace fatiq::cli {

/// Built-in configuration: the reference specimen, beam and load settings.
/// A user config file overrides individual keys.
inline constexpr const char* default_config_text = R"(# Weibull-Basquin reference specimen
[specimen]
m = 1.5
alpha = 3
p = 0.05
N_p = 2e6
S_p = 200

# sn-simulate: specimens tested at each constant severity
[sn]
severities = 150,200,250,300,350
specimens = 50
p_values = 0.05,0.5

# miner-demo: a periodic two-block sequence (severity_mpa:count pairs)
[miner]
blocks = 150:100000,300:100000
repeat = 400
p_values = 0.05,0.5
replications = 10000
n_points = 200

# I-beam geometry (m), quadrature steps (m) and reference specimen volume (m^3)
[beam]
b = 0.65
f = 0.012
h = 1.315
e = 0.06
L = 20
dx = 0.02
dy = 0.005
dz_web = 0.002
dz_flange = 0.01
lambda_ref = 3e-5

# Loads in MN
[load]
P_values = 0.15,0.2,0.25,0.3,0.35
P_mean = 0.25
c_values = 0,0.2,0.5,1
p_values = 0.05,0.5

[mc]
replications = 10000
seed = 20240517
n_min = 1e3
n_max = 1e9
n_points = 200

[laplace]
k = 4.5,6,10
)";

}  // namespace fatiq::cli
