//! Derivative-free maximization of smooth, even functions over measurement
//! directions on the unit sphere.
//!
//! The search protocol is a coarse global stage (Fibonacci points on a
//! hemisphere; even objectives make the other half redundant) followed by a
//! compass refinement in a two-parameter spherical chart centered on each
//! seed. The chart is a rotated `(theta, phi)` frame, which keeps the
//! refinement away from pole degeneracies regardless of where the optimum
//! lies.

use crate::state::Vec3;

/// Number of coarse points used by the default protocol.
pub const GRID_POINTS: usize = 2048;
/// Compass refinement stops once the chart step drops below this.
pub const MIN_STEP: f64 = 1e-12;
/// Hard cap on compass iterations per seed.
pub const MAX_ITERS: usize = 500;

/// Deterministic Fibonacci-lattice points on the upper hemisphere
/// (`n_3 >= 0`).
pub fn fibonacci_hemisphere(count: usize) -> Vec<Vec3> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..count)
        .map(|i| {
            let z = (i as f64 + 0.5) / count as f64; // uniform in (0, 1)
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Orthonormal pair spanning the tangent plane at `n`.
pub fn tangent_frame(n: &Vec3) -> (Vec3, Vec3) {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let u = axis.cross(n).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Compass search in the spherical chart centered on `start`: poll the four
/// axis moves, accept the best strict improvement, halve the step otherwise.
/// Runs until the step falls below [`MIN_STEP`] or [`MAX_ITERS`] polls.
pub fn compass_refine<F: Fn(&Vec3) -> f64>(f: &F, start: Vec3, step0: f64) -> (Vec3, f64) {
    let mut center = start;
    let (mut u, mut v) = tangent_frame(&center);
    let mut a = 0.0_f64;
    let mut b = 0.0_f64;
    let chart = |c: &Vec3, u: &Vec3, v: &Vec3, a: f64, b: f64| (c + u * a + v * b).normalize();
    let mut best = f(&center);
    let mut step = step0;
    let mut iters = 0;
    while step >= MIN_STEP && iters < MAX_ITERS {
        iters += 1;
        let mut improved = false;
        let mut best_move = (a, b);
        for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = chart(&center, &u, &v, a + da, b + db);
            let val = f(&cand);
            if val > best {
                best = val;
                best_move = (a + da, b + db);
                improved = true;
            }
        }
        if improved {
            a = best_move.0;
            b = best_move.1;
            if a * a + b * b > 0.09 {
                // Re-center the chart before it distorts.
                center = chart(&center, &u, &v, a, b);
                let frame = tangent_frame(&center);
                u = frame.0;
                v = frame.1;
                a = 0.0;
                b = 0.0;
            }
        } else {
            step *= 0.5;
        }
    }
    (chart(&center, &u, &v, a, b), best)
}

/// Global maximization: Fibonacci grid, then compass refinement from the
/// best grid cells and any caller-provided seed directions. Returns the best
/// refined direction and value.
pub fn maximize_on_sphere<F: Fn(&Vec3) -> f64>(
    f: &F,
    grid_points: usize,
    extra_seeds: &[Vec3],
) -> (Vec3, f64) {
    let grid = fibonacci_hemisphere(grid_points);
    let mut scored: Vec<(f64, Vec3)> = grid.iter().map(|n| (f(n), *n)).collect();
    scored.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap());

    // Keep the best few well-separated cells as refinement seeds.
    let mut seeds: Vec<Vec3> = Vec::new();
    for (_, n) in scored.iter() {
        if seeds.len() >= 6 {
            break;
        }
        if seeds.iter().all(|s| s.dot(n).abs() < 0.95) || seeds.is_empty() {
            seeds.push(*n);
        }
    }
    seeds.extend_from_slice(extra_seeds);

    let step0 = (2.0 * std::f64::consts::PI / grid_points as f64).sqrt().max(1e-3);
    let mut best = (scored[0].1, scored[0].0);
    for seed in &seeds {
        let (n, val) = compass_refine(f, *seed, step0);
        if val > best.1 {
            best = (n, val);
        }
    }
    best
}

/// Global minimization; see [`maximize_on_sphere`].
pub fn minimize_on_sphere<F: Fn(&Vec3) -> f64>(
    f: &F,
    grid_points: usize,
    extra_seeds: &[Vec3],
) -> (Vec3, f64) {
    let neg = |n: &Vec3| -f(n);
    let (n, val) = maximize_on_sphere(&neg, grid_points, extra_seeds);
    (n, -val)
}

/// Sign representative of a direction: `n_3 >= 0`, ties broken by `n_1 >= 0`,
/// then `n_2 >= 0`.
pub fn canonical_sign(n: Vec3) -> Vec3 {
    if n.z > 0.0 {
        n
    } else if n.z < 0.0 {
        -n
    } else if n.x > 0.0 {
        n
    } else if n.x < 0.0 {
        -n
    } else if n.y >= 0.0 {
        n
    } else {
        -n
    }
}
