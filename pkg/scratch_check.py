"""Scratch: verify manifold forward values and analytic gradients vs FD."""
import numpy as np
from ribfx import manifold as mf
from ribfx.rng import CounterRng

# forward spot checks
p = mf.HyperbolicPoint.from_tangent(np.array([0.6, 0.8]), 1.0)
print("expmap (0.6,0.8):", p.space, p.time)  # expect (0.70512,0.94016), 1.54308
print("constraint:", p.constraint_residual(1.0))

o = mf.HyperbolicPoint.from_tangent(np.zeros(2), 4.0)
print("origin c=4 inner:", mf.lorentz_inner(o.space, o.space, 4.0))  # -0.25

u = np.array([1.2, -0.3, 0.4])
print("radial isometry:", mf.geodesic_distance(mf.exp_map0(u, 2.7), mf.exp_map0(0*u, 2.7), 2.7), np.linalg.norm(u))
print("antipodal:", mf.geodesic_distance(mf.exp_map0(u, 2.7), mf.exp_map0(-u, 2.7), 2.7), 2*np.linalg.norm(u))
print("aperture K=.1 c=1 n=1:", mf.half_aperture(np.array([1.0, 0.0]), 1.0), np.arcsin(0.2))
# radial nesting -> angle ~ 0 ; reflected -> ~ pi
par = mf.exp_map0(np.array([1.0, 0.0]), 1.0)
ch = mf.exp_map0(np.array([2.0, 0.0]), 1.0)
print("radial angle:", mf.exterior_angle(par, ch, 1.0))
ch2 = mf.exp_map0(np.array([-0.5, 0.0]), 1.0)
print("reflected angle:", mf.exterior_angle(par, ch2, 1.0))

# FD gradient checks
rng = CounterRng(13)
h = 1e-5
def fd(f, x):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x); e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2*h)
    return g

worst = 0.0
for trial in range(30):
    d = 2 + int(rng.integers(0, 7))
    u = rng.normal(d) * 0.8
    w = rng.normal(d) * 0.8
    logc = float(rng.normal()) * 0.4
    c = np.exp(logc)

    dval, gu, gw, glc = mf.distance_from_tangents_grad(u, w, c)
    fgu = fd(lambda x: mf.distance_from_tangents(x, w, c), u)
    fgw = fd(lambda x: mf.distance_from_tangents(u, x, c), w)
    fglc = (mf.distance_from_tangents(u, w, np.exp(logc+h)) - mf.distance_from_tangents(u, w, np.exp(logc-h)))/(2*h)
    rel = lambda a, b: np.max(np.abs(a-b)/np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6))
    e1 = max(rel(gu, fgu), rel(gw, fgw), rel(np.array([glc]), np.array([fglc])))

    aval, agu, aglc = mf.half_aperture_from_tangent_grad(u, c)
    fagu = fd(lambda x: mf.half_aperture(mf.exp_map0(x, c), c), u)
    faglc = (mf.half_aperture(mf.exp_map0(u, np.exp(logc+h)), np.exp(logc+h)) - mf.half_aperture(mf.exp_map0(u, np.exp(logc-h)), np.exp(logc-h)))/(2*h)
    e2 = max(rel(agu, fagu), rel(np.array([aglc]), np.array([faglc])))

    eval_, egu, egw, eglc = mf.exterior_angle_from_tangents_grad(u, w, c)
    fegu = fd(lambda x: mf.exterior_angle(mf.exp_map0(x, c), mf.exp_map0(w, c), c), u)
    fegw = fd(lambda x: mf.exterior_angle(mf.exp_map0(u, c), mf.exp_map0(x, c), c), w)
    feglc = (mf.exterior_angle(mf.exp_map0(u, np.exp(logc+h)), mf.exp_map0(w, np.exp(logc+h)), np.exp(logc+h)) - mf.exterior_angle(mf.exp_map0(u, np.exp(logc-h)), mf.exp_map0(w, np.exp(logc-h)), np.exp(logc-h)))/(2*h)
    e3 = max(rel(egu, fegu), rel(egw, fegw), rel(np.array([eglc]), np.array([feglc])))

    worst = max(worst, e1, e2, e3)
    if max(e1,e2,e3) > 1e-4:
        print("TRIAL", trial, "d", d, "errs", e1, e2, e3)
print("worst rel err:", worst)

# constraint residual for large-ish z
rng2 = CounterRng(99)
worst_res = 0.0
for _ in range(2000):
    d = 2 + int(rng2.integers(0, 63))
    direction = rng2.normal(d)
    direction /= np.linalg.norm(direction)
    radius = rng2.uniform() * 2.0
    c = 0.1 + rng2.uniform() * 9.9
    pt = mf.HyperbolicPoint.from_tangent(direction * radius, c)
    worst_res = max(worst_res, abs(pt.constraint_residual(c)))
print("worst constraint residual:", worst_res)
