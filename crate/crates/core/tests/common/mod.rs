//! Independent oracles: finite differences and a piecewise-linear godron count
//! that never touches the jet machinery.
#![allow(dead_code)]

use fronts::geometry::MapKind;
use fronts::MapSpec;

pub fn surface(name: &str) -> MapSpec {
    let path = format!("{}/surfaces/{name}.map", env!("CARGO_MANIFEST_DIR"));
    MapSpec::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Central difference of order `alpha[i]` in each variable, step `h`.
fn central(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[u32], h: f64) -> f64 {
    // (offset multiplier, weight) pairs for derivative orders 0..=3
    fn stencil(k: u32) -> &'static [(f64, f64)] {
        match k {
            0 => &[(0.0, 1.0)],
            1 => &[(-1.0, -0.5), (1.0, 0.5)],
            2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
            _ => panic!("stencil order"),
        }
    }
    let mut total = 0.0;
    let mut idx = vec![0usize; alpha.len()];
    loop {
        let mut y = x.to_vec();
        let mut w = 1.0;
        for (i, &k) in alpha.iter().enumerate() {
            let (off, wt) = stencil(k)[idx[i]];
            y[i] += off * h;
            w *= wt;
        }
        total += w * f(&y);
        let mut i = 0;
        loop {
            if i == alpha.len() {
                let deg: u32 = alpha.iter().sum();
                return total / h.powi(deg as i32);
            }
            idx[i] += 1;
            if idx[i] < stencil(alpha[i]).len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// `∂^α f(x)` by central differences with two Richardson steps (`O(h⁶)`).
pub fn fd_partial(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[u32], h: f64) -> f64 {
    let d = [h, h / 2.0, h / 4.0].map(|s| central(f, x, alpha, s));
    let r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
    (16.0 * r1[1] - r1[0]) / 15.0
}

/// `fd_partial` over halving steps from `h`, keeping the estimate that moves
/// least when the step is halved again.
#[allow(dead_code)]
pub fn fd_partial_adaptive(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[u32], h: f64) -> f64 {
    let est: Vec<f64> = (0..5).map(|k| fd_partial(f, x, alpha, h / f64::from(1u32 << k))).collect();
    est.windows(2)
        .min_by(|a, b| (a[0] - a[1]).abs().total_cmp(&(b[0] - b[1]).abs()))
        .map(|w| w[1])
        .unwrap()
}

/// Godron count of an affine surface by a piecewise-linear lattice model:
/// `F` sampled on the lattice, `ν`, `h_ij`, `dh` by central differences, `ξ`
/// an adjugate column, and per triangle the common zeros of the linear
/// interpolants of `h` and `ψ = dh(ξ)/(|dh||ξ|)`.
pub fn pl_godrons(spec: &MapSpec, cells: usize) -> Vec<[f64; 2]> {
    assert_eq!(spec.kind, MapKind::Affine);
    let iv: Vec<_> = spec.domain.iter().map(|d| d.clone().unwrap()).collect();
    assert!(iv[0].periodic && iv[1].periodic);
    let n = cells;
    let step = [iv[0].width() / n as f64, iv[1].width() / n as f64];
    let at = |i: isize, j: isize| -> usize {
        (i.rem_euclid(n as isize) as usize) * n + j.rem_euclid(n as isize) as usize
    };
    let f: Vec<[f64; 3]> = (0..n * n)
        .map(|k| {
            let p = [iv[0].lo + (k / n) as f64 * step[0], iv[1].lo + (k % n) as f64 * step[1]];
            let v = spec.eval::<f64>(&p).unwrap();
            [v[0], v[1], v[2]]
        })
        .collect();
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut hess = vec![[0.0; 3]; n * n];
    let mut hval = vec![0.0; n * n];
    for i in 0..n as isize {
        for j in 0..n as isize {
            let c = f[at(i, j)];
            let fu = sub(f[at(i + 1, j)], f[at(i - 1, j)]).map(|x| x / (2.0 * step[0]));
            let fv = sub(f[at(i, j + 1)], f[at(i, j - 1)]).map(|x| x / (2.0 * step[1]));
            let nu = [fu[1] * fv[2] - fu[2] * fv[1], fu[2] * fv[0] - fu[0] * fv[2], fu[0] * fv[1] - fu[1] * fv[0]];
            let second = |a: [f64; 3], b: [f64; 3], s: f64| {
                [(a[0] - 2.0 * c[0] + b[0]) / s, (a[1] - 2.0 * c[1] + b[1]) / s, (a[2] - 2.0 * c[2] + b[2]) / s]
            };
            let fuu = second(f[at(i + 1, j)], f[at(i - 1, j)], step[0] * step[0]);
            let fvv = second(f[at(i, j + 1)], f[at(i, j - 1)], step[1] * step[1]);
            let fuv = sub(sub(f[at(i + 1, j + 1)], f[at(i + 1, j - 1)]), sub(f[at(i - 1, j + 1)], f[at(i - 1, j - 1)]))
                .map(|x| x / (4.0 * step[0] * step[1]));
            let m = [dot(nu, fuu), dot(nu, fuv), dot(nu, fvv)];
            hess[at(i, j)] = m;
            hval[at(i, j)] = m[0] * m[2] - m[1] * m[1];
        }
    }
    let dh = |i: isize, j: isize| {
        [
            (hval[at(i + 1, j)] - hval[at(i - 1, j)]) / (2.0 * step[0]),
            (hval[at(i, j + 1)] - hval[at(i, j - 1)]) / (2.0 * step[1]),
        ]
    };
    let mut found = Vec::new();
    for i in 0..n as isize {
        for j in 0..n as isize {
            for tri in [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]] {
                let hs: Vec<f64> = tri.iter().map(|&(a, b)| hval[at(a, b)]).collect();
                if hs.iter().all(|&x| x < 0.0) || hs.iter().all(|&x| x >= 0.0) {
                    continue;
                }
                let m0 = hess[at(tri[0].0, tri[0].1)];
                let column = if m0[2].hypot(m0[1]) >= m0[1].hypot(m0[0]) { 0 } else { 1 };
                let mut xi0 = None;
                let mut psi = [0.0; 3];
                for (k, &(a, b)) in tri.iter().enumerate() {
                    let m = hess[at(a, b)];
                    let mut xi = if column == 0 { [m[2], -m[1]] } else { [-m[1], m[0]] };
                    let r = *xi0.get_or_insert(xi);
                    if xi[0] * r[0] + xi[1] * r[1] < 0.0 {
                        xi = [-xi[0], -xi[1]];
                    }
                    let g = dh(a, b);
                    psi[k] = (g[0] * xi[0] + g[1] * xi[1]) / (g[0].hypot(g[1]) * xi[0].hypot(xi[1]));
                }
                // barycentric l with l·1 = 1, l·h = 0, l·psi = 0
                let a = [[1.0, 1.0, 1.0], [hs[0], hs[1], hs[2]], psi];
                let det3 = |m: [[f64; 3]; 3]| {
                    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
                };
                let d = det3(a);
                if d == 0.0 {
                    continue;
                }
                let l: Vec<f64> = (0..3)
                    .map(|c| {
                        let mut b = a;
                        for (r, row) in b.iter_mut().enumerate() {
                            row[c] = if r == 0 { 1.0 } else { 0.0 };
                        }
                        det3(b) / d
                    })
                    .collect();
                if l.iter().all(|&x| x >= 0.0) {
                    let (mut u, mut v) = (0.0, 0.0);
                    for (k, &(a, b)) in tri.iter().enumerate() {
                        u += l[k] * (iv[0].lo + a as f64 * step[0]);
                        v += l[k] * (iv[1].lo + b as f64 * step[1]);
                    }
                    let w = [iv[0].width(), iv[1].width()];
                    let near = |q: &[f64; 2]| {
                        (0..2).all(|a| {
                            let d = ([u, v][a] - q[a]).rem_euclid(w[a]);
                            d.min(w[a] - d) < 2.0 * step[a]
                        })
                    };
                    // zeros on a shared edge show up in both triangles
                    if !found.iter().any(near) {
                        found.push([u, v]);
                    }
                }
            }
        }
    }
    found
}

/// Multi-indices in `nvars` variables of total degree at most `order`.
pub fn exponents(nvars: usize, order: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| (0..=order as u32).map(move |k| [e.clone(), vec![k]].concat()))
            .collect();
    }
    out.retain(|e| e.iter().sum::<u32>() as usize <= order);
    out
}

/// A random smooth expression in `u, v, w`, finite on all of `ℝ³`.
pub fn random_expr<R: rand::Rng>(rng: &mut R, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => "u".into(),
            1 => "v".into(),
            2 => "w".into(),
            _ => format!("({:.3})", rng.gen_range(-2.0..2.0)),
        };
    }
    let op = rng.gen_range(0..10);
    let a = random_expr(rng, depth - 1);
    match op {
        0..=4 => {
            let b = random_expr(rng, depth - 1);
            match op {
                0 => format!("({a} + {b})"),
                1 => format!("({a} - {b})"),
                2 => format!("({a} * {b})"),
                3 => format!("({a} / (2 + sin({b})))"),
                _ => format!("({a})^{}", rng.gen_range(2..4)),
            }
        }
        5 => format!("sin({a})"),
        6 => format!("cos({a})"),
        7 => format!("exp({a}/4)"),
        8 => format!("sqrt(1 + ({a})^2)"),
        _ => format!("log(2 + cos({a}))"),
    }
}
