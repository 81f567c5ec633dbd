use nalgebra::{Matrix2, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_core::folding::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cube_point(rng: &mut ChaCha8Rng, r: f64) -> Point4 {
    [0; 4].map(|_| rng.gen_range(-r..=r))
}

/// Central differences with step `scale * max(1, |x|)` per coordinate;
/// `None` when the stencil leaves the map's domain.
fn fd_jacobian(map: &PrimitiveMap, prof: &StretchProfile, p: Point4, scale: f64) -> Option<Matrix4<f64>> {
    let mut j = Matrix4::zeros();
    for k in 0..4 {
        let h = scale * p[k].abs().max(1.0);
        let (mut a, mut b) = (p, p);
        a[k] += h;
        b[k] -= h;
        let (fa, fb) = (map.eval(prof, a).ok()?.0, map.eval(prof, b).ok()?.0);
        for i in 0..4 {
            j[(i, k)] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    Some(j)
}

fn rel_err(fd: &Matrix4<f64>, an: &Matrix4<f64>) -> f64 {
    (fd - an).abs().max() / an.abs().max().max(1.0)
}

#[test]
fn taffy_fixes_first_cell_and_is_continuous() {
    let prof = StretchProfile::new(8.0).unwrap();
    let cells = CellLayout { cells: 4, lipschitz: 8.0 };
    let (q, j) = taffy_map(&prof, &cells, [0.3, 0.7]).unwrap();
    assert_eq!(q, [0.3, 0.7]);
    assert_eq!(j, Matrix2::identity());
    for i in 0..4 {
        let seam = i as f64 + 1.0 - 1.0 / 8.0;
        let base = 2.0 * i as f64 + 1.0 - 1.0 / 8.0;
        let (q, j) = taffy_map(&prof, &cells, [seam, 0.2]).unwrap();
        assert!((q[0] - base).abs() < 1e-12 && (q[1] - 0.2).abs() < 1e-12);
        assert!((j - Matrix2::identity()).abs().max() < 1e-12);
        let e = 1e-9;
        let (l, _) = taffy_map(&prof, &cells, [seam - e, 0.2]).unwrap();
        assert!((l[0] - q[0]).abs() < 1e-8);
        // end of the gap meets the next cell image at 2(i+1)
        let end = i as f64 + 1.0;
        let (q, j) = taffy_map(&prof, &cells, [end, 0.9]).unwrap();
        assert!((q[0] - 2.0 * end).abs() < 1e-11, "{q:?}");
        assert!((q[1] - 0.9).abs() < 1e-12);
        assert!((j - Matrix2::identity()).abs().max() < 1e-12);
    }
    assert!(taffy_map(&prof, &cells, [4.5, 0.5]).is_err());
    assert!(taffy_map(&prof, &cells, [1.0, 1.5]).is_err());
    assert!(taffy_map(&prof, &cells, [-0.1, 0.5]).is_err());
}

#[test]
fn taffy_cells_land_in_their_targets_and_det_is_one() {
    for l in [8.0, 128.0] {
        let prof = StretchProfile::new(l).unwrap();
        let cells = CellLayout { cells: 4, lipschitz: l };
        let mut g = rng(3);
        for _ in 0..10_000 {
            let p = [g.gen_range(0.0..=4.0), g.gen_range(0.0..=1.0)];
            let (q, j) = taffy_map(&prof, &cells, p).unwrap();
            assert!((j.determinant() - 1.0).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&q[1]));
            if let CellSlot::Cell(i) = cells.locate(p[0]).unwrap() {
                assert!(q[0] >= 2.0 * i as f64 && q[0] <= 2.0 * i as f64 + 1.0 - 1.0 / l);
            }
        }
    }
}

#[test]
fn slide1_examples() {
    let s = SlideProfile::new(4);
    let (q, j) = slide1(&s, [4.5, 0.25, 3.0, 0.5]);
    assert_eq!(q, [4.5, 0.25, 3.0, 4.5]);
    assert_eq!(j, Matrix4::identity());
    // rho'' = 0 but rho' != 0 at the middle of a transition
    let (_, j) = slide1(&s, [1.5, 0.0, 2.0, 0.0]);
    let mut off = j - Matrix4::identity();
    assert!(off[(1, 2)] != 0.0 && off[(1, 2)] == off[(3, 0)]);
    off[(1, 2)] = 0.0;
    off[(3, 0)] = 0.0;
    assert!(off.abs().max() < 1e-12);
    let mut g = rng(5);
    let bound = 16.0;
    for _ in 0..10_000 {
        let p = [g.gen_range(-1.0..8.0), g.gen_range(-2.0..2.0), g.gen_range(-bound..=bound), g.gen_range(-2.0..2.0)];
        let (_, j) = slide1(&s, p);
        assert!(symplectic_defect(&j) <= 1e-12);
    }
}

#[test]
fn slide2_examples_and_block_composition() {
    let s = SlideProfile::new(4);
    let (q, _) = slide2(&s, [6.25, 0.5, 2.0, 4.5]);
    assert_eq!(q, [2.25, 0.5, 2.0, 4.5]);
    let mut g = rng(6);
    for _ in 0..10_000 {
        let p = [g.gen_range(-1.0..8.0), g.gen_range(-16.0..16.0), g.gen_range(-2.0..8.0), g.gen_range(-1.0..8.0)];
        let (_, j) = slide2(&s, p);
        assert!(symplectic_defect(&j) <= 1e-12);
    }
    // Y_i x Y_j corners
    let l = 8.0;
    let len = 1.0 - 1.0 / l;
    for i in 0..4 {
        for j in 0..4 {
            let (i2, j2) = (2.0 * i as f64, 2.0 * j as f64);
            for mask in 0..16 {
                let pick = |k: usize, lo: f64, hi: f64| if mask >> k & 1 == 1 { hi } else { lo };
                let p = [pick(0, i2, i2 + len), pick(1, 0.0, 1.0), pick(2, j2, j2 + len), pick(3, 0.0, 1.0)];
                let q = slide2(&s, slide1(&s, p).0).0;
                let lo = [0.0, 0.0, j2, i2];
                let hi = [len, 1.0, j2 + len, i2 + 1.0];
                for k in 0..4 {
                    assert!(q[k] >= lo[k] - 1e-10 && q[k] <= hi[k] + 1e-10, "{p:?} -> {q:?}");
                }
            }
        }
    }
}

#[test]
fn cube_to_prism_corners_and_singular_values() {
    for r in [0.5, 1.0, 1.7] {
        let m = cube_to_prism(r).unwrap();
        let prof = StretchProfile::new(2.0).unwrap();
        let (lo, j) = m.eval(&prof, [-r; 4]).unwrap();
        assert!(lo.iter().all(|v| v.abs() < 1e-12));
        let (hi, _) = m.eval(&prof, [r; 4]).unwrap();
        let w = 4.0 * r * r;
        assert!((hi[0] - w).abs() < 1e-12 && (hi[1] - 1.0).abs() < 1e-12 && (hi[2] - w).abs() < 1e-12);
        let sv = j.fixed_view::<2, 2>(0, 0).into_owned().singular_values();
        let (a, b) = (sv.max(), sv.min());
        assert!((a - 2.0 * r).abs() < 1e-12 && (b - 0.5 / r).abs() < 1e-12);
        assert!(symplectic_defect(&j) < 1e-15);
    }
    assert!(cube_to_prism(0.0).is_err());
}

#[test]
fn primitive_jacobians_match_finite_differences() {
    // At h = 1e-6 max(1, |x|) the central-difference error is h^2 F'''/6, and
    // the stretch map has F''' ~ L^3 in its ramp corners. Where the flat 1e-5
    // bound is missed, the error must shrink at least 3x when h is halved.
    for (r, l) in [(1.0, 8.0), (1.0, 128.0), (2.0, 32.0)] {
        let plan = compose_plan(r, l).unwrap();
        let mut g = rng(9);
        for _ in 0..1000 {
            let p = cube_point(&mut g, r);
            let stages = plan.trace(p).unwrap();
            for (k, map) in plan.stack.iter().enumerate() {
                let (x, an) = (stages[k].0, stages[k + 1].1);
                let Some(fd) = fd_jacobian(map, &plan.stretch, x, 1e-6) else { continue };
                let e1 = rel_err(&fd, &an);
                if e1 <= 1e-5 {
                    continue;
                }
                let e2 = rel_err(&fd_jacobian(map, &plan.stretch, x, 5e-7).unwrap(), &an);
                assert!(e2 <= e1 / 3.0, "R = {r}, L = {l}, {} at {x:?}: {e1:e} -> {e2:e}", map.name());
            }
        }
    }
}

#[test]
fn full_plan_is_symplectic() {
    for r in [1.0, 2.0] {
        for l in [8.0, 32.0, 128.0] {
            let plan = compose_plan(r, l).unwrap();
            let mut g = rng(11);
            for _ in 0..10_000 {
                let (_, j) = plan.eval_with_jacobian_dd(cube_point(&mut g, r)).unwrap();
                let d = symplectic_defect_dd(&j);
                assert!(d <= 1e-9, "R = {r}, L = {l}: {d:e}");
            }
        }
    }
}

#[test]
fn blocks_land_in_the_cylinder() {
    let plan = compose_plan(1.0, 8.0).unwrap();
    let b = plan.block_preimage(0, 0).unwrap();
    let centre = [0, 1, 2, 3].map(|k| 0.5 * (b.lo[k] + b.hi[k]));
    let q = plan.eval(centre).unwrap();
    assert!(q[0] * q[0] + q[1] * q[1] <= 0.5);
    for r in [1.0, 1.5] {
        let plan = compose_plan(r, 16.0).unwrap();
        let mut g = rng(13);
        for i in 0..plan.cells {
            for j in 0..plan.cells {
                let pre = plan.block_preimage(i, j).unwrap();
                let target = plan.block_target(i, j).unwrap();
                for c in pre.corners() {
                    let c = c.map(|v| v.clamp(-r, r));
                    assert!(target.contains(&plan.eval(c).unwrap(), 1e-10));
                }
                for _ in 0..200 {
                    let p = [0, 1, 2, 3].map(|k| g.gen_range(pre.lo[k]..pre.hi[k]));
                    assert_eq!(plan.block_index(p).unwrap(), Some((i, j)));
                    let q = plan.eval(p).unwrap();
                    assert!(target.contains(&q, 1e-10));
                    assert!(q[0] * q[0] + q[1] * q[1] <= 0.5 + 1e-10);
                }
            }
        }
    }
}

#[test]
fn plan_rejects_points_outside_the_cube() {
    let plan = compose_plan(1.0, 8.0).unwrap();
    assert!(plan.eval([1.01, 0.0, 0.0, 0.0]).is_err());
    assert!(compose_plan(1.0, 1.0).is_err());
    assert!(compose_plan(-1.0, 8.0).is_err());
    let json = serde_json::to_value(&plan).unwrap();
    assert_eq!(json["cells"], 4);
    assert_eq!(json["stack"].as_array().unwrap().len(), 6);
    assert!(json["stretch"]["c"].as_f64().unwrap() > 0.0);
}
