//! Adaptive Gauss-Kronrod quadrature used as an independent oracle in tests.

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol.max(1e-300) || depth == 0 || (b - a).abs() < 1e-15 * a.abs().max(1.0) {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// `int_a^b f(x) dx` to roughly `tol` absolute error.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    adapt(&f, a, b, tol, 40)
}

/// `int_a^inf f(x) dx` via `x = a + s t / (1 - t)`; `scale` should match the
/// decay length of the integrand.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> f64 {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = a + scale * t / u;
        let v = f(x) * scale / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let cuts = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97, 1.0];
    cuts.windows(2)
        .map(|w| adapt(&g, w[0], w[1], tol / 7.0, 40))
        .sum()
}

/// Gamma-mixture density built straight from `(weight, scale, shape)` triples.
pub fn mixture_pdf(components: &[(f64, f64, u32)], x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    components
        .iter()
        .map(|&(w, s, k)| {
            let lnfac: f64 = (1..k).map(|i| (i as f64).ln()).sum();
            if x == 0.0 {
                return if k == 1 { w / s } else { 0.0 };
            }
            w * ((k as f64 - 1.0) * x.ln() - x / s - k as f64 * s.ln() - lnfac).exp()
        })
        .sum()
}

/// Survival function of a mixture by direct quadrature of its density.
pub fn mixture_survival(components: &[(f64, f64, u32)], x: f64, tol: f64) -> f64 {
    let scale = components.iter().map(|c| c.1 * c.2 as f64).fold(0.0, f64::max);
    integrate_semi_infinite(|t| mixture_pdf(components, t), x, scale, tol)
}
