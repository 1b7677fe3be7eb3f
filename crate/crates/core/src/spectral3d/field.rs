use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use super::grid::FourierGrid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients of a periodic vector field, `[component][i][j][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    n: usize,
    data: Vec<Complex64>,
}

impl VectorField {
    pub fn zeros(grid: &FourierGrid) -> Self {
        Self {
            n: grid.n(),
            data: vec![ZERO; grid.coeff_len()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Interleaved `(re, im)` values, the real unknown vector used by the solvers.
    pub fn to_real(&self) -> Vec<f64> {
        self.data.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(grid: &FourierGrid, v: &[f64]) -> Self {
        assert_eq!(v.len(), 2 * grid.coeff_len(), "real vector length does not match the grid");
        Self {
            n: grid.n(),
            data: v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        }
    }

    /// Samples `f` on the `n³` grid and transforms. Modes beyond the retained
    /// range (Nyquist planes) are dropped.
    pub fn from_physical(grid: &FourierGrid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let n = grid.n();
        let h = 1.0 / n as f64;
        let mut out = Self::zeros(grid);
        let block = n * n * n;
        for (i, j, l) in grid.modes() {
            let v = f(i as f64 * h, j as f64 * h, l as f64 * h);
            for c in 0..3 {
                out.data[grid.index(c, i, j, l)] = Complex64::new(v[c], 0.0);
            }
        }
        for c in 0..3 {
            grid.fft3(&mut out.data[c * block..(c + 1) * block], false, false);
        }
        out.zero_nyquist(grid);
        out
    }

    /// Real-space values on the `n³` grid, `[component][x][y][z]`.
    pub fn to_physical(&self, grid: &FourierGrid) -> Vec<f64> {
        let n = grid.n();
        let block = n * n * n;
        let mut buf = self.data.clone();
        for c in 0..3 {
            grid.fft3(&mut buf[c * block..(c + 1) * block], false, true);
        }
        buf.iter().map(|z| z.re).collect()
    }

    pub fn zero_nyquist(&mut self, grid: &FourierGrid) {
        for (i, j, l) in grid.modes() {
            if grid.is_nyquist(i, j, l) {
                for c in 0..3 {
                    self.data[grid.index(c, i, j, l)] = ZERO;
                }
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|z| *z *= a);
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|2πk · û_k|` over all modes.
    pub fn max_divergence(&self, grid: &FourierGrid) -> f64 {
        grid.modes()
            .map(|(i, j, l)| {
                let kap = grid.kappa(i, j, l);
                let d: Complex64 = (0..3).map(|c| kap[c] * self.data[grid.index(c, i, j, l)]).sum();
                d.norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|û_{−k} − conj(û_k)|`.
    pub fn max_asymmetry(&self, grid: &FourierGrid) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, l) in grid.modes() {
            let k = grid.k(i, j, l);
            let (mi, mj, ml) = (grid.mode_index(-k[0]), grid.mode_index(-k[1]), grid.mode_index(-k[2]));
            for c in 0..3 {
                let a = self.data[grid.index(c, i, j, l)];
                let b = self.data[grid.index(c, mi, mj, ml)];
                worst = worst.max((b - a.conj()).norm());
            }
        }
        worst
    }

    pub fn mean(&self, grid: &FourierGrid) -> [Complex64; 3] {
        [0, 1, 2].map(|c| self.data[grid.index(c, 0, 0, 0)])
    }
}

/// A field in the discretely divergence-free, mean-zero space: `k · û_k = 0`,
/// `û_0 = 0`, Nyquist planes zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DivFreeField(VectorField);

impl DivFreeField {
    pub fn field(&self) -> &VectorField {
        &self.0
    }

    pub fn into_field(self) -> VectorField {
        self.0
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.to_real()
    }

    /// Wraps coefficients known to satisfy the constraints, re-projecting to
    /// remove roundoff.
    pub fn from_real(grid: &FourierGrid, v: &[f64]) -> Self {
        leray_project(grid, &VectorField::from_real(grid, v))
    }
}

/// `û_k ↦ (I − k kᵀ/|k|²) û_k`, `û_0 ↦ 0`, Nyquist planes zeroed.
pub fn leray_project(grid: &FourierGrid, f: &VectorField) -> DivFreeField {
    let mut out = f.clone();
    leray_in_place(grid, &mut out.data);
    DivFreeField(out)
}

pub(crate) fn leray_in_place(grid: &FourierGrid, data: &mut [Complex64]) {
    for (i, j, l) in grid.modes() {
        let ix = [grid.index(0, i, j, l), grid.index(1, i, j, l), grid.index(2, i, j, l)];
        let k = grid.k(i, j, l);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0 || grid.is_nyquist(i, j, l) {
            ix.iter().for_each(|&x| data[x] = ZERO);
            continue;
        }
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let dot: Complex64 = (0..3).map(|c| kf[c] * data[ix[c]]).sum();
        let s = dot / k2 as f64;
        for c in 0..3 {
            data[ix[c]] -= kf[c] * s;
        }
    }
}

/// `(curl f)ˆ_k = i 2πk × f̂_k`.
pub fn curl(grid: &FourierGrid, f: &VectorField) -> VectorField {
    let mut out = VectorField::zeros(grid);
    curl_into(grid, &f.data, &mut out.data);
    out
}

pub(crate) fn curl_into(grid: &FourierGrid, f: &[Complex64], out: &mut [Complex64]) {
    let iu = Complex64::new(0.0, 1.0);
    for (i, j, l) in grid.modes() {
        let kap = grid.kappa(i, j, l);
        let a = [f[grid.index(0, i, j, l)], f[grid.index(1, i, j, l)], f[grid.index(2, i, j, l)]];
        out[grid.index(0, i, j, l)] = iu * (kap[1] * a[2] - kap[2] * a[1]);
        out[grid.index(1, i, j, l)] = iu * (kap[2] * a[0] - kap[0] * a[2]);
        out[grid.index(2, i, j, l)] = iu * (kap[0] * a[1] - kap[1] * a[0]);
    }
}

/// Curl of a divergence-free field; stays in the same space.
pub fn curl_hat(grid: &FourierGrid, f: &DivFreeField) -> DivFreeField {
    DivFreeField(curl(grid, &f.0))
}

/// Scratch buffers for dealiased products, reusable across calls.
#[derive(Debug, Clone)]
pub struct ProductWorkspace {
    pad: Vec<Complex64>,
    phys_a: Vec<Complex64>,
    phys_b: Vec<Complex64>,
}

impl ProductWorkspace {
    pub fn new(grid: &FourierGrid) -> Self {
        let m3 = grid.padded().pow(3);
        Self {
            pad: vec![ZERO; m3],
            phys_a: vec![ZERO; 3 * m3],
            phys_b: vec![ZERO; 3 * m3],
        }
    }
}

fn to_padded_physical(grid: &FourierGrid, src: &[Complex64], pad: &mut [Complex64], dst: &mut [Complex64]) {
    let m = grid.padded();
    let m3 = m * m * m;
    let mi = |k: i64| k.rem_euclid(m as i64) as usize;
    for c in 0..3 {
        pad.iter_mut().for_each(|z| *z = ZERO);
        for (i, j, l) in grid.modes() {
            if grid.is_nyquist(i, j, l) {
                continue;
            }
            let k = grid.k(i, j, l);
            pad[(mi(k[0]) * m + mi(k[1])) * m + mi(k[2])] = src[grid.index(c, i, j, l)];
        }
        grid.fft3(pad, true, true);
        dst[c * m3..(c + 1) * m3].copy_from_slice(pad);
    }
}

/// Pointwise `a × b` formed on the `3n/2` grid and truncated to the retained
/// modes, so quadratic products carry no aliasing error. Nyquist planes of
/// the inputs are ignored.
pub fn cross_product_dealiased(grid: &FourierGrid, a: &VectorField, b: &VectorField) -> VectorField {
    let mut ws = ProductWorkspace::new(grid);
    let mut out = VectorField::zeros(grid);
    cross_into(grid, &a.data, &b.data, &mut ws, &mut out.data);
    out
}

pub(crate) fn cross_into(
    grid: &FourierGrid,
    a: &[Complex64],
    b: &[Complex64],
    ws: &mut ProductWorkspace,
    out: &mut [Complex64],
) {
    let m = grid.padded();
    let m3 = m * m * m;
    to_padded_physical(grid, a, &mut ws.pad, &mut ws.phys_a);
    to_padded_physical(grid, b, &mut ws.pad, &mut ws.phys_b);
    let mi = |k: i64| k.rem_euclid(m as i64) as usize;
    for c in 0..3 {
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        for p in 0..m3 {
            // fields are real; drop the roundoff imaginary part
            let v = ws.phys_a[c1 * m3 + p].re * ws.phys_b[c2 * m3 + p].re
                - ws.phys_a[c2 * m3 + p].re * ws.phys_b[c1 * m3 + p].re;
            ws.pad[p] = Complex64::new(v, 0.0);
        }
        grid.fft3(&mut ws.pad, true, false);
        for (i, j, l) in grid.modes() {
            let o = grid.index(c, i, j, l);
            if grid.is_nyquist(i, j, l) {
                out[o] = ZERO;
                continue;
            }
            let k = grid.k(i, j, l);
            out[o] = ws.pad[(mi(k[0]) * m + mi(k[1])) * m + mi(k[2])];
        }
    }
}

/// `∫ a · b` over the unit cube by Parseval.
pub fn inner_product(a: &VectorField, b: &VectorField) -> f64 {
    a.data.iter().zip(&b.data).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// `∫ ∇a : ∇b = Σ |2πk|² Re⟨â_k, b̂_k⟩`.
pub fn grad_inner(grid: &FourierGrid, a: &VectorField, b: &VectorField) -> f64 {
    let mut sum = 0.0;
    for (i, j, l) in grid.modes() {
        let kap = grid.kappa(i, j, l);
        let k2 = kap[0] * kap[0] + kap[1] * kap[1] + kap[2] * kap[2];
        for c in 0..3 {
            let o = grid.index(c, i, j, l);
            sum += k2 * (a.data[o].re * b.data[o].re + a.data[o].im * b.data[o].im);
        }
    }
    sum
}

/// ABC flow `(A sin 2πz + C cos 2πy, B sin 2πx + A cos 2πz, C sin 2πy + B cos 2πx)`,
/// a Beltrami field with `curl u = 2π u`.
pub fn make_abc_field(grid: &FourierGrid, a: f64, b: f64, c: f64) -> DivFreeField {
    use std::f64::consts::PI;
    let tp = 2.0 * PI;
    let f = VectorField::from_physical(grid, |x, y, z| {
        [
            a * (tp * z).sin() + c * (tp * y).cos(),
            b * (tp * x).sin() + a * (tp * z).cos(),
            c * (tp * y).sin() + b * (tp * x).cos(),
        ]
    });
    leray_project(grid, &f)
}

/// Random real divergence-free field with amplitude spectrum `|k|^(−decay)`,
/// normalized to `∫|u|² = 1`.
pub fn make_random_divfree(grid: &FourierGrid, seed: u64, decay: f64) -> DivFreeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = VectorField::zeros(grid);
    for (i, j, l) in grid.modes() {
        let k = grid.k(i, j, l);
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let amp = if k2 == 0.0 { 0.0 } else { k2.sqrt().powf(-decay) };
        for c in 0..3 {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            f.data[grid.index(c, i, j, l)] = amp * Complex64::new(re, im);
        }
    }
    // Hermitian symmetrization makes the physical field real
    let mut sym = f.clone();
    for (i, j, l) in grid.modes() {
        let k = grid.k(i, j, l);
        let (mi, mj, ml) = (grid.mode_index(-k[0]), grid.mode_index(-k[1]), grid.mode_index(-k[2]));
        for c in 0..3 {
            let a = f.data[grid.index(c, i, j, l)];
            let b = f.data[grid.index(c, mi, mj, ml)];
            sym.data[grid.index(c, i, j, l)] = 0.5 * (a + b.conj());
        }
    }
    let mut out = leray_project(grid, &sym).0;
    let norm = inner_product(&out, &out).sqrt();
    if norm > 0.0 {
        out.scale(1.0 / norm);
    }
    DivFreeField(out)
}

/// `Q₁ = ½‖u‖²`.
pub fn kinetic_energy(u: &VectorField) -> f64 {
    0.5 * inner_product(u, u)
}

/// `Q₂ = ½(u, curl u)`.
pub fn helicity(grid: &FourierGrid, u: &VectorField) -> f64 {
    0.5 * inner_product(u, &curl(grid, u))
}
