"""
Two viscosities and the growth of z
===================================

"""

from deltawave import RiemannData
from deltawave.distcalc import viscous_family
from deltawave.experiments import beta_schedule, macroscopic_run, moderateness_probe

rd = RiemannData(-1, 2, 1, 0, 1, 2, 1, 0)

# u, v, w diffuse at beta(eps), z at eps
for e in (0.1, 0.05, 0.02):
    print(f"eps={e:g}  beta={beta_schedule(e):.4f}")

# sup|z| sqrt(eps) only starts to fall once log(1/sqrt(eps)) exceeds 2
rows = macroscopic_run(rd, K=1.0, eps_list=(0.1, 0.05, 0.02), T=1.0, h=1e-2)
for r in rows:
    print(f"eps={r.epsilon:g}  sup|z|={r.sup_z:.4f}  sup|z| sqrt(eps)={r.sup_z_sqrt_eps:.4f}")

# growth rates of the viscous family with mollified data
fam = viscous_family(rd.initial_data(), mollify_radius=lambda e: e)
for j in (0, 1):
    res = moderateness_probe(fam, j, [0.1, 0.05, 0.02, 0.01], nx=121)
    print(f"j={j}: sup ~ eps^-{res.p:.3f} (fit residual {res.fit_residual:.3f})")
