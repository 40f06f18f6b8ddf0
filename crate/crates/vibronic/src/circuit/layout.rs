//! Register layout and the two's-complement fixed-point format used by the
//! arithmetic gates.
//!
//! Coefficients are stored in revolutions (angle / 2π) so that adding the
//! product of a coefficient register and an integer monomial register into
//! the phase-gradient register applies the phase modulo 2π for free: integer
//! wraparound of the modular adder is exactly reduction by full turns.

use crate::circuit::CompileError;
use crate::grid::GridConfig;
use crate::model::VibronicModel;

/// Two's-complement fixed point: `width = int_bits + frac_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointFormat {
    pub width: u32,
    pub frac_bits: u32,
}

impl FixedPointFormat {
    pub fn new(width: u32, frac_bits: u32) -> Result<Self, CompileError> {
        if width > 62 {
            return Err(CompileError::WidthTooLarge(width));
        }
        assert!(frac_bits <= width, "fractional field wider than the register");
        Ok(Self { width, frac_bits })
    }

    pub fn int_bits(&self) -> u32 {
        self.width - self.frac_bits
    }

    pub fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    /// Encode a value in revolutions as a signed fixed-point bit pattern.
    pub fn encode(&self, revolutions: f64) -> u64 {
        let scaled = (revolutions * (1u64 << self.frac_bits) as f64).round();
        debug_assert!(
            scaled.abs() < (1u64 << (self.width - 1)) as f64,
            "encode out of range: {revolutions} rev at width {}",
            self.width
        );
        (scaled as i64 as u64) & self.mask()
    }

    /// Signed integer read of a masked bit pattern of this width.
    pub fn decode_int(&self, bits: u64) -> i64 {
        sign_extend(bits, self.width)
    }
}

/// Two's-complement sign extension of a `bits`-wide pattern.
pub fn sign_extend(value: u64, bits: u32) -> i64 {
    debug_assert!(bits >= 1 && bits <= 64);
    let shift = 64 - bits;
    ((value << shift) as i64) >> shift
}

/// Contiguous qubit range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegSpan {
    pub offset: u32,
    pub bits: u32,
}

impl RegSpan {
    pub fn mask(&self) -> u64 {
        ((1u128 << self.bits) - 1) as u64
    }

    pub fn qubits(&self) -> impl Iterator<Item = u32> {
        self.offset..self.offset + self.bits
    }
}

/// Placement of every register on the qubit line.
///
/// Low to high: electronic (`n` qubits), one `k`-qubit register per mode,
/// the coefficient register, product caches for degrees `2..=cache_degrees`
/// (degree `l` occupies `l·k` qubits), and the phase-gradient register.
/// `select_ancilla` counts the coefficient-load iterator workspace for
/// reporting; those qubits hold no state the simulators need to track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    pub electronic_bits: u32,
    pub mode_bits: u32,
    pub mode_count: usize,
    pub format: FixedPointFormat,
    /// Caches exist for degrees `2..=cache_degrees`; values below 2 mean none.
    pub cache_degrees: u32,
    pub select_ancilla: u32,
}

impl RegisterLayout {
    pub fn new(
        model: &VibronicModel,
        grid: GridConfig,
        format: FixedPointFormat,
        cache_degrees: u32,
    ) -> Self {
        Self {
            electronic_bits: model.electronic_bits(),
            mode_bits: grid.bits(),
            mode_count: model.mode_count(),
            format,
            cache_degrees,
            select_ancilla: model.electronic_bits() + 1,
        }
    }

    /// Layout for a full evolution: the kinetic blocks square a mode register,
    /// so at least the degree-2 cache is present.
    pub fn for_evolution(model: &VibronicModel, grid: GridConfig, format: FixedPointFormat) -> Self {
        Self::new(model, grid, format, model.max_degree.max(2))
    }

    pub fn electronic_span(&self) -> RegSpan {
        RegSpan { offset: 0, bits: self.electronic_bits }
    }

    pub fn span(&self, reg: crate::circuit::Reg) -> RegSpan {
        use crate::circuit::Reg;
        let n = self.electronic_bits;
        let k = self.mode_bits;
        let modes_end = n + k * self.mode_count as u32;
        match reg {
            Reg::Mode(r) => {
                assert!(r < self.mode_count, "mode register {r} out of range");
                RegSpan { offset: n + k * r as u32, bits: k }
            }
            Reg::Coeff => RegSpan { offset: modes_end, bits: self.format.width },
            Reg::Cache(degree) => {
                assert!(
                    (2..=self.cache_degrees).contains(&degree),
                    "cache register for degree {degree} not allocated"
                );
                let mut offset = modes_end + self.format.width;
                for l in 2..degree {
                    offset += l * k;
                }
                RegSpan { offset, bits: degree * k }
            }
            Reg::Gradient => {
                let mut offset = modes_end + self.format.width;
                for l in 2..=self.cache_degrees {
                    offset += l * k;
                }
                RegSpan { offset, bits: self.format.width }
            }
        }
    }

    /// Most significant qubit of one mode register.
    pub fn mode_msb(&self, r: usize) -> u32 {
        let s = self.span(crate::circuit::Reg::Mode(r));
        s.offset + s.bits - 1
    }

    /// Electronic plus mode qubits: the part a semantic state carries.
    pub fn system_bits(&self) -> u32 {
        self.electronic_bits + self.mode_bits * self.mode_count as u32
    }

    /// All simulated qubits (system, coefficient, caches, gradient).
    pub fn arithmetic_bits(&self) -> u32 {
        self.span(crate::circuit::Reg::Gradient).offset + self.format.width
    }

    /// Reported total including the load-iterator workspace.
    pub fn total_bits(&self) -> u32 {
        self.arithmetic_bits() + self.select_ancilla
    }
}

/// Largest phase magnitude (radians) any single term can reach on the grid,
/// and the term that reaches it.
pub fn max_term_magnitude(
    model: &VibronicModel,
    grid: GridConfig,
    max_abs_angle: f64,
    include_v0: bool,
    include_kinetic: bool,
) -> (f64, (usize, usize, String)) {
    let delta = grid.spacing();
    let half = grid.half_points() as f64;
    let mut best = (0.0f64, (0usize, 0usize, String::from("1")));
    for (&(j, i), block) in &model.couplings {
        for (index, &c) in block {
            let deg = index.degree() as i32;
            let mut c_eff = c.abs();
            if include_v0 && j == i && index.exponents().len() == 1 {
                let (r, a) = index.exponents()[0];
                if a == 2 {
                    c_eff = (c + 0.5 * model.frequencies[r]).abs().max(c_eff);
                }
            }
            let mag = max_abs_angle * c_eff * (delta * half).powi(deg);
            if mag > best.0 {
                best = (mag, (j, i, index.to_string()));
            }
        }
    }
    if include_v0 || include_kinetic {
        for (r, &w) in model.frequencies.iter().enumerate() {
            let mag = max_abs_angle * 0.5 * w * (delta * half) * (delta * half);
            if mag > best.0 {
                best = (mag, (0, 0, format!("Q{r}^2")));
            }
        }
    }
    best
}

/// Integer bits needed so no term's phase magnitude reaches `2^int_bits`.
pub fn required_int_bits(
    model: &VibronicModel,
    grid: GridConfig,
    max_abs_angle: f64,
    include_v0: bool,
    include_kinetic: bool,
) -> u32 {
    let (mag, _) = max_term_magnitude(model, grid, max_abs_angle, include_v0, include_kinetic);
    if mag < 1.0 {
        return 0;
    }
    (mag.log2().floor() as i64 + 1).clamp(1, 4096) as u32
}

/// Choose the fixed-point format: either auto-sized (`frac_bits` fractional
/// bits plus whatever integer field the model needs) or pinned to a total
/// width, in which case a model whose terms do not fit is a compile error
/// naming the offending term.
pub fn resolve_format(
    model: &VibronicModel,
    grid: GridConfig,
    max_abs_angle: f64,
    include_v0: bool,
    include_kinetic: bool,
    frac_bits: u32,
    pinned_width: Option<u32>,
) -> Result<FixedPointFormat, CompileError> {
    let int_needed = required_int_bits(model, grid, max_abs_angle, include_v0, include_kinetic);
    match pinned_width {
        None => {
            if frac_bits + int_needed > 62 {
                let (mag, (bra, ket, index)) =
                    max_term_magnitude(model, grid, max_abs_angle, include_v0, include_kinetic);
                return Err(CompileError::FixedPointOverflow {
                    bra,
                    ket,
                    index,
                    magnitude: mag,
                    int_bits: 62 - frac_bits.min(62),
                    width: frac_bits + int_needed,
                });
            }
            FixedPointFormat::new(frac_bits + int_needed, frac_bits)
        }
        Some(width) => {
            if int_needed >= width {
                let (mag, (bra, ket, index)) =
                    max_term_magnitude(model, grid, max_abs_angle, include_v0, include_kinetic);
                return Err(CompileError::FixedPointOverflow {
                    bra,
                    ket,
                    index,
                    magnitude: mag,
                    int_bits: width.saturating_sub(1),
                    width,
                });
            }
            FixedPointFormat::new(width, width - int_needed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Reg;
    use crate::model::MultiIndex;

    #[test]
    fn sign_extension() {
        assert_eq!(sign_extend(0b1111, 4), -1);
        assert_eq!(sign_extend(0b0111, 4), 7);
        assert_eq!(sign_extend(0b1000, 4), -8);
        assert_eq!(sign_extend(0, 4), 0);
    }

    #[test]
    fn encode_decode_round_trip() {
        let f = FixedPointFormat::new(16, 12).unwrap();
        for rev in [-3.25f64, -0.001, 0.0, 0.5, 7.999] {
            let bits = f.encode(rev);
            let back = f.decode_int(bits) as f64 / (1u64 << f.frac_bits) as f64;
            assert!((back - rev).abs() <= 0.5 / (1u64 << f.frac_bits) as f64);
        }
    }

    #[test]
    fn spans_are_disjoint_and_ordered() {
        let m = crate::model::VibronicModel::new(3, vec![1.0, 1.0], 3);
        let g = GridConfig::new(3).unwrap();
        let fmt = FixedPointFormat::new(10, 8).unwrap();
        let layout = RegisterLayout::for_evolution(&m, g, fmt);
        let mut spans = vec![layout.electronic_span()];
        spans.push(layout.span(Reg::Mode(0)));
        spans.push(layout.span(Reg::Mode(1)));
        spans.push(layout.span(Reg::Coeff));
        spans.push(layout.span(Reg::Cache(2)));
        spans.push(layout.span(Reg::Cache(3)));
        spans.push(layout.span(Reg::Gradient));
        for w in spans.windows(2) {
            assert_eq!(w[0].offset + w[0].bits, w[1].offset);
        }
        // n + Mk + w + (2+3)k + w
        assert_eq!(layout.arithmetic_bits(), 2 + 6 + 10 + 15 + 10);
        assert_eq!(layout.total_bits(), layout.arithmetic_bits() + 3);
    }

    #[test]
    fn int_bits_track_term_magnitude() {
        let mut m = crate::model::VibronicModel::new(1, vec![1.0], 2);
        m.set_coupling(0, 0, MultiIndex::power(0, 2), 10.0);
        let g = GridConfig::new(4).unwrap();
        // max |θ·c·Δ²·(K/2)²| = 1·10·(2π/16)·64 = 251.3 → 8 bits
        let bits = required_int_bits(&m, g, 1.0, false, false);
        assert_eq!(bits, 8);
        // Auto sizing adds them to the fractional field.
        let fmt = resolve_format(&m, g, 1.0, false, false, 24, None).unwrap();
        assert_eq!(fmt.width, 32);
        // Pinning the width below the requirement is an overflow error.
        let err = resolve_format(&m, g, 1.0, false, false, 4, Some(8)).unwrap_err();
        match err {
            CompileError::FixedPointOverflow { bra: 0, ket: 0, index, .. } => {
                assert_eq!(index, "Q0^2");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
