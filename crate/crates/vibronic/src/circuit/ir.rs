//! Typed gate list. Arithmetic gates address whole registers; Clifford and X
//! gates address absolute qubit indices from the layout.

use std::fmt;
use std::io::{self, Write};

use crate::circuit::{RegisterLayout, RegSpan};

/// Identifier pairing a computation with its later uncomputation.
pub type Tag = u32;

/// A value register addressed by arithmetic gates. The electronic register is
/// implicit: it is always the selector of a `Load`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Reg {
    Mode(usize),
    Coeff,
    /// Product cache holding a monomial of the given degree.
    Cache(u32),
    Gradient,
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reg::Mode(r) => write!(f, "mode{r}"),
            Reg::Coeff => write!(f, "coeff"),
            Reg::Cache(l) => write!(f, "cache{l}"),
            Reg::Gradient => write!(f, "gradient"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Hadamard { qubit: u32 },
    Cnot { control: u32, target: u32 },
    PauliX { qubit: u32 },
    /// XOR the table entry selected by the electronic register into `target`
    /// (a bank of multi-controlled multi-X gates). One entry per electronic
    /// basis state, stored as fixed-point bit patterns.
    Load { tag: Tag, target: Reg, table: Vec<u64> },
    /// XOR a constant into `target`: plain X gates, no selection.
    LoadImmediate { tag: Tag, target: Reg, value: u64 },
    /// `dst += signed(src_a)·signed(src_b)` modulo the destination width.
    Mult { tag: Tag, src_a: Reg, src_b: Reg, dst: Reg },
    /// Add the product of two registers into the phase gradient, shifted so
    /// one fractional unit is one turn over `2^frac` — the multiply-and-add
    /// form that skips a separate product register.
    MultAddPhase { src_a: Reg, src_b: Reg },
    /// Add a single register into the phase gradient (degree-0 terms).
    AddPhase { src: Reg },
    /// DFT (or its inverse) on one mode register.
    QftConj { mode: usize, inverse: bool },
    /// Reverse a previously tagged computation. Tags close in LIFO order.
    Uncompute { tag: Tag },
}

/// Monotonic tag source shared across one compilation.
#[derive(Debug, Default)]
pub struct TagGen(Tag);

impl TagGen {
    pub fn next(&mut self) -> Tag {
        let t = self.0;
        self.0 += 1;
        t
    }
}

/// A compiled sequence with the layout it was compiled against.
#[derive(Debug, Clone)]
pub struct GateList {
    pub layout: RegisterLayout,
    pub gates: Vec<Gate>,
}

impl GateList {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Line-oriented text export: one gate per line,
    /// `GATE <op> <qubits...> # <params>`. Deterministic across runs.
    pub fn export_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# qubits total={} system={} width={} frac={}",
            self.layout.arithmetic_bits(),
            self.layout.system_bits(),
            self.layout.format.width,
            self.layout.format.frac_bits
        )?;
        for gate in &self.gates {
            self.write_gate(&mut out, gate)?;
        }
        Ok(())
    }

    fn span_str(&self, span: RegSpan) -> String {
        span.qubits().map(|q| q.to_string()).collect::<Vec<_>>().join(" ")
    }

    fn write_gate<W: Write>(&self, out: &mut W, gate: &Gate) -> io::Result<()> {
        match gate {
            Gate::Hadamard { qubit } => writeln!(out, "GATE H {qubit}"),
            Gate::Cnot { control, target } => writeln!(out, "GATE CNOT {control} {target}"),
            Gate::PauliX { qubit } => writeln!(out, "GATE X {qubit}"),
            Gate::Load { tag, target, table } => {
                let tbl: Vec<String> = table.iter().map(|v| format!("{v:x}")).collect();
                writeln!(
                    out,
                    "GATE LOAD {} # tag={tag} reg={target} table={}",
                    self.span_str(self.layout.span(*target)),
                    tbl.join(",")
                )
            }
            Gate::LoadImmediate { tag, target, value } => writeln!(
                out,
                "GATE IMM {} # tag={tag} reg={target} value={value:x}",
                self.span_str(self.layout.span(*target))
            ),
            Gate::Mult { tag, src_a, src_b, dst } => writeln!(
                out,
                "GATE MULT {} # tag={tag} a={src_a} b={src_b} dst={dst}",
                self.span_str(self.layout.span(*dst))
            ),
            Gate::MultAddPhase { src_a, src_b } => writeln!(
                out,
                "GATE MULTADDPHASE {} # a={src_a} b={src_b}",
                self.span_str(self.layout.span(Reg::Gradient))
            ),
            Gate::AddPhase { src } => writeln!(
                out,
                "GATE ADDPHASE {} # src={src}",
                self.span_str(self.layout.span(Reg::Gradient))
            ),
            Gate::QftConj { mode, inverse } => writeln!(
                out,
                "GATE QFT {} # mode={mode} dir={}",
                self.span_str(self.layout.span(Reg::Mode(*mode))),
                if *inverse { "bwd" } else { "fwd" }
            ),
            Gate::Uncompute { tag } => writeln!(out, "GATE UNCOMPUTE # tag={tag}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::FixedPointFormat;
    use crate::grid::GridConfig;
    use crate::model::VibronicModel;

    #[test]
    fn export_is_deterministic() {
        let m = VibronicModel::new(2, vec![1.0], 2);
        let g = GridConfig::new(2).unwrap();
        let fmt = FixedPointFormat::new(8, 6).unwrap();
        let layout = RegisterLayout::for_evolution(&m, g, fmt);
        let list = GateList {
            layout,
            gates: vec![
                Gate::Hadamard { qubit: 0 },
                Gate::Load { tag: 0, target: Reg::Coeff, table: vec![0x3f, 0x01] },
                Gate::MultAddPhase { src_a: Reg::Coeff, src_b: Reg::Mode(0) },
                Gate::Uncompute { tag: 0 },
                Gate::Hadamard { qubit: 0 },
            ],
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        list.export_text(&mut a).unwrap();
        list.export_text(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("GATE LOAD"));
        assert!(text.contains("table=3f,1"));
    }
}
