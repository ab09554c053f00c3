use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::defect::{DefectSolutions, Setting};
use crate::error::{Error, Result};
use crate::slcore::{combination, Extension, Solution};
use crate::specialfn::SpectralPoint;

type C = Complex64;

/// Relative size below which k or det K counts as zero.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorrectionForm {
    Scalar { k: C },
    Matrix { k: [[C; 2]; 2] },
}

/// The two degenerate separated extensions: only β (α = 0) or only α
/// (β = 0) differs from the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegenerateSide {
    BetaOnly,
    AlphaOnly,
}

/// Finite-rank difference between the resolvent of an extension and that
/// of the reference extension at z:
///
/// R_ext(z) − R_ref(z) = sign · Σ_{j,k} [K⁻¹]_{jk} ⟨v_j, ·⟩ u_k,
///
/// with kets u_k and bras v_j. Bras are stored already conjugated: the
/// functions `bras[j]` satisfy ⟨v_j, f⟩ = ∫ bras[j]·f·r.
#[derive(Clone)]
pub struct KreinCorrection {
    z: SpectralPoint,
    form: CorrectionForm,
    sign: f64,
    kets: Vec<Solution>,
    bras: Vec<Solution>,
    scale: f64,
}

impl std::fmt::Debug for KreinCorrection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KreinCorrection(z = {}, {:?}, sign {})", self.z.value(), self.form, self.sign)
    }
}

impl KreinCorrection {
    fn scalar(z: SpectralPoint, k: C, scale: f64, sign: f64, ket: Solution, bra: Solution) -> Result<Self> {
        if !(k.norm() > SINGULAR_THRESHOLD * scale) {
            return Err(Error::SpectralPoint { z: z.value(), reason: format!("Krein scalar k = {k} vanishes") });
        }
        Ok(KreinCorrection { z, form: CorrectionForm::Scalar { k }, sign, kets: vec![ket], bras: vec![bra], scale })
    }

    fn matrix(z: SpectralPoint, k: [[C; 2]; 2], scale: f64, sign: f64, defect: &DefectSolutions) -> Result<Self> {
        let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
        if !(det.norm() > SINGULAR_THRESHOLD * scale * scale) {
            return Err(Error::SpectralPoint { z: z.value(), reason: format!("Krein matrix is singular, det = {det}") });
        }
        let u = defect.u().to_vec();
        Ok(KreinCorrection { z, form: CorrectionForm::Matrix { k }, sign, kets: u.clone(), bras: u, scale })
    }

    pub fn z(&self) -> SpectralPoint {
        self.z
    }

    pub fn form(&self) -> CorrectionForm {
        self.form
    }

    /// +1 if the correction is added to the reference resolvent, −1 if
    /// subtracted.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn kets(&self) -> &[Solution] {
        &self.kets
    }

    pub fn bras(&self) -> &[Solution] {
        &self.bras
    }

    /// Natural size of the entries, used for singularity tests.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// sign·K⁻¹ (1×1 in the scalar case), indexed [bra j][ket k].
    pub fn coefficients(&self) -> Vec<Vec<C>> {
        match self.form {
            CorrectionForm::Scalar { k } => vec![vec![k.inv() * self.sign]],
            CorrectionForm::Matrix { k } => {
                let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
                let s = self.sign / det;
                vec![vec![k[1][1] * s, -k[0][1] * s], vec![-k[1][0] * s, k[0][0] * s]]
            }
        }
    }

    /// Integral kernel of the correction at (x, y).
    pub fn kernel(&self, x: f64, y: f64) -> Result<C> {
        let coef = self.coefficients();
        let mut kets = Vec::with_capacity(self.kets.len());
        for u in &self.kets {
            kets.push(u.state(x)?.y);
        }
        let mut total = C::new(0.0, 0.0);
        for (j, row) in coef.iter().enumerate() {
            let b = self.bras[j].state(y)?.y;
            for (k, c) in row.iter().enumerate() {
                total += c * kets[k] * b;
            }
        }
        Ok(total)
    }
}

fn cot(t: f64) -> f64 {
    t.cos() / t.sin()
}

fn angle_open(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < std::f64::consts::PI) {
        return Err(Error::Parameter(format!("{name} = {v} must lie in (0, π)")));
    }
    Ok(())
}

fn one_lc(defect: &DefectSolutions) -> Result<&Solution> {
    match (defect.setting(), defect.w()) {
        (Setting::OneLc { .. }, Some(w)) => Ok(w),
        _ => Err(Error::Usage("needs one-limit-circle defect solutions".into())),
    }
}

fn two_lc(defect: &DefectSolutions) -> Result<([C; 2], [C; 2])> {
    match defect.setting() {
        Setting::TwoLc { .. } => {
            let b = defect.brackets();
            Ok(([b.psi_a[0], b.psi_a[1]], [b.psi_b[0], b.psi_b[1]]))
        }
        _ => Err(Error::Usage("needs two-limit-circle defect solutions".into())),
    }
}

/// One limit-circle endpoint: k = cot θ + [w_z, ψ_a](a); the correction
/// k⁻¹⟨w_{z̄}, ·⟩ w_z is added to the θ = 0 resolvent.
pub fn krein_scalar_one_lc(theta: f64, defect: &DefectSolutions) -> Result<KreinCorrection> {
    angle_open("theta", theta)?;
    let w = one_lc(defect)?;
    let wpsi = defect.brackets().psi_a[0];
    let k = cot(theta) + wpsi;
    let scale = cot(theta).abs() + wpsi.norm();
    KreinCorrection::scalar(defect.z(), k, scale, 1.0, w.clone(), w.clone())
}

/// Two limit-circle endpoints, separated conditions with α, β ∈ (0, π);
/// the correction is subtracted from the (0, 0) resolvent.
pub fn krein_matrix_two_lc(alpha: f64, beta: f64, defect: &DefectSolutions) -> Result<KreinCorrection> {
    angle_open("alpha", alpha)?;
    angle_open("beta", beta)?;
    let (pa, pb) = two_lc(defect)?;
    let k = [[cot(beta) + pb[0], -pa[0]], [pb[1], -cot(alpha) - pa[1]]];
    let scale = cot(alpha).abs() + cot(beta).abs() + pa.iter().chain(&pb).map(|c| c.norm()).sum::<f64>();
    KreinCorrection::matrix(defect.z(), k, scale, -1.0, defect)
}

/// Separated extensions sharing one boundary condition with the reference:
/// (0, β) couples through u_1 with k = −cot β − [u_1, ψ_b](b), and (α, 0)
/// through u_2 with k = cot α + [u_2, ψ_a](a). Both are added.
pub fn krein_degenerate_separated(which: DegenerateSide, param: f64, defect: &DefectSolutions) -> Result<KreinCorrection> {
    angle_open("parameter", param)?;
    let (pa, pb) = two_lc(defect)?;
    let u = defect.u();
    let (k, scale, f) = match which {
        DegenerateSide::BetaOnly => (-cot(param) - pb[0], cot(param).abs() + pb[0].norm(), &u[0]),
        DegenerateSide::AlphaOnly => (cot(param) + pa[1], cot(param).abs() + pa[1].norm(), &u[1]),
    };
    KreinCorrection::scalar(defect.z(), k, scale, 1.0, f.clone(), f.clone())
}

/// Coupled conditions with R ∈ SL₂(ℝ). For R₁₂ ≠ 0 a 2×2 matrix couples
/// u_1 and u_2. For R₁₂ = 0 the extension shares a larger part with the
/// reference and a single function u_R = e^{−iη}R₂₂u_2 + u_1 carries the
/// correction. Both are added.
pub fn krein_coupled(r: [[f64; 2]; 2], eta: f64, defect: &DefectSolutions) -> Result<KreinCorrection> {
    Extension::coupled(r, eta)?;
    let (pa, pb) = two_lc(defect)?;
    let z = defect.z();
    let e = C::from_polar(1.0, eta);
    let brs = pa.iter().chain(&pb).map(|c| c.norm()).sum::<f64>();
    if r[0][1] != 0.0 {
        let r12 = r[0][1];
        let k = [
            [r[1][1] / r12 - pb[0], -e.conj() / r12 + pa[0]],
            [-e / r12 - pb[1], r[0][0] / r12 + pa[1]],
        ];
        let scale = (r[0][0].abs() + r[1][1].abs() + 1.0) / r12.abs() + brs;
        return KreinCorrection::matrix(z, k, scale, 1.0, defect);
    }
    let u = defect.u();
    let r22 = r[1][1];
    let ur_psi_a = e.conj() * r22 * pa[1] + pa[0];
    let ur_psi_b = e.conj() * r22 * pb[1] + pb[0];
    let k = r[1][0] * r22 + e * r22 * ur_psi_a - ur_psi_b;
    let scale = (r[1][0] * r22).abs() + r22.abs() * ur_psi_a.norm() + ur_psi_b.norm();
    let ket = combination(vec![(e.conj() * r22, u[1].clone()), (C::new(1.0, 0.0), u[0].clone())]);
    let bra = combination(vec![(e * r22, u[1].clone()), (C::new(1.0, 0.0), u[0].clone())]);
    KreinCorrection::scalar(z, k, scale, 1.0, ket, bra)
}

/// Dispatches on the extension; `None` when it is the reference itself
/// (θ = 0, or α = β = 0).
pub fn krein_correction(ext: &Extension, defect: &DefectSolutions) -> Result<Option<KreinCorrection>> {
    match (*ext, defect.setting()) {
        (Extension::SeparatedOneLc { theta }, Setting::OneLc { .. }) => {
            if theta == 0.0 {
                Ok(None)
            } else {
                krein_scalar_one_lc(theta, defect).map(Some)
            }
        }
        (Extension::SeparatedTwoLc { alpha, beta }, Setting::TwoLc { .. }) => match (alpha == 0.0, beta == 0.0) {
            (true, true) => Ok(None),
            (true, false) => krein_degenerate_separated(DegenerateSide::BetaOnly, beta, defect).map(Some),
            (false, true) => krein_degenerate_separated(DegenerateSide::AlphaOnly, alpha, defect).map(Some),
            (false, false) => krein_matrix_two_lc(alpha, beta, defect).map(Some),
        },
        (Extension::Coupled { r, eta }, Setting::TwoLc { .. }) => krein_coupled(r, eta, defect).map(Some),
        _ => Err(Error::Usage("extension does not match the endpoint configuration".into())),
    }
}
