/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
/// Returns the best abscissa seen and its value.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let (mut best_x, mut best_f) = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..iterations {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    (best_x, best_f)
}

/// Golden-section maximisation, the mirror of [`golden_min`].
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let (x, v) = golden_min(|t| -f(t), lo, hi, iterations);
    (x, -v)
}
