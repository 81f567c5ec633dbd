/// Distance from `p = (x1, y1, x2, y2)` to the closed disk
/// `{y1 = y2 = 0, x1^2 + x2^2 <= R^2}`.
pub fn lagrangian_disk_distance(p: [f64; 4], radius: f64) -> f64 {
    let inplane = (p[0].hypot(p[2]) - radius).max(0.0);
    inplane.hypot(p[1].hypot(p[3]))
}

/// Volume of the open `t`-neighbourhood of that disk in `R^4`:
/// `π R^2 · π t^2 + (4/3) π^2 R t^3 + (π^2/2) t^4` (slab over the disk, half
/// solid tori over the rim, ball quarter-sections at no extra cost since the
/// rim is smooth).
pub fn disk_tube_volume(radius: f64, t: f64) -> f64 {
    use std::f64::consts::PI;
    PI * radius * radius * PI * t * t + 4.0 / 3.0 * PI * PI * radius * t.powi(3) + PI * PI / 2.0 * t.powi(4)
}
