//! Best translation between two profiles in the sup norm.

use super::profile::Profile;

fn distance(p1: &Profile, p2: &Profile, shift: f64) -> f64 {
    (0..p1.grid.n)
        .map(|i| (p1.values[i] - p2.value_at(p1.grid.t(i) + shift)).abs())
        .fold(0.0, f64::max)
}

/// Minimizes `sup_t |p1(t) − p2(t + shift)|` over `shift ∈ [−T, T]`: a scan
/// at the grid step locates the basin, golden section refines it.
pub fn align_translate(p1: &Profile, p2: &Profile) -> (f64, f64) {
    let h = p1.grid.h;
    let t_max = p1.grid.t0.abs().max(p1.grid.t_end().abs());
    let steps = (t_max / h).round() as isize;
    let mut best = (0.0, distance(p1, p2, 0.0));
    for k in -steps..=steps {
        let s = k as f64 * h;
        let d = distance(p1, p2, s);
        if d < best.1 {
            best = (s, d);
        }
    }
    if best.1 == 0.0 {
        return best;
    }
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut d1 = distance(p1, p2, x1);
    let mut d2 = distance(p1, p2, x2);
    for _ in 0..80 {
        if d1 < d2 {
            b = x2;
            x2 = x1;
            d2 = d1;
            x1 = b - r * (b - a);
            d1 = distance(p1, p2, x1);
        } else {
            a = x1;
            x1 = x2;
            d1 = d2;
            x2 = a + r * (b - a);
            d2 = distance(p1, p2, x2);
        }
    }
    for (x, d) in [(x1, d1), (x2, d2)] {
        if d < best.1 {
            best = (x, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavesolve::profile::Grid;

    fn logistic() -> Profile {
        let g = Grid::symmetric(20.0, 0.05);
        let v = g.points().into_iter().map(|t| 1.0 / (1.0 + (-t).exp())).collect();
        Profile::new(g, v, 1.0)
    }

    #[test]
    fn identical_profiles() {
        let p = logistic();
        assert_eq!(align_translate(&p, &p), (0.0, 0.0));
    }

    #[test]
    fn exact_grid_translate() {
        let p1 = logistic();
        let p2 = p1.shifted(3.0 * p1.grid.h);
        let (s, d) = align_translate(&p1, &p2);
        // p1 is about 2e-9 at the left end, where p2 continues by 0
        assert!((s + 3.0 * p1.grid.h).abs() < 1e-6, "{s}");
        assert!(d < 1e-8);
    }

    #[test]
    fn off_grid_translate() {
        let g = Grid::symmetric(20.0, 0.05);
        let f = |t: f64| 1.0 / (1.0 + (-t).exp());
        let p1 = Profile::new(g, g.points().into_iter().map(f).collect(), 1.0);
        let p2 = Profile::new(g, g.points().into_iter().map(|t| f(t - 0.1234)).collect(), 1.0);
        let (s, d) = align_translate(&p1, &p2);
        assert!((s - 0.1234).abs() < 2e-3, "{s}");
        assert!(d < 1e-3);
    }
}
