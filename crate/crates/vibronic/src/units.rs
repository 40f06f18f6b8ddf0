//! Unit conversions. Everything inside the crate is Hartree atomic units;
//! model files and CLI flags may use eV, cm⁻¹, and femtoseconds.

/// CODATA-2018 Hartree energy in electronvolts.
pub const EV_PER_HARTREE: f64 = 27.211_386_245_988;

/// CODATA-2018 Hartree energy expressed as a wavenumber in cm⁻¹.
pub const CM1_PER_HARTREE: f64 = 219_474.631_363_2;

/// Atomic unit of time in seconds (ħ / E_h).
pub const AU_TIME_SECONDS: f64 = 2.418_884_326_5857e-17;

/// One femtosecond in atomic units of time.
pub const FS_TO_AU: f64 = 1.0e-15 / AU_TIME_SECONDS;

/// Energy units accepted by the model file `unit` field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    Hartree,
    ElectronVolt,
    WaveNumber,
}

impl EnergyUnit {
    /// Parse a unit label. Accepts `au`/`hartree`, `eV`, and `cm-1`/`cm^-1`.
    pub fn parse(label: &str) -> Option<Self> {
        match label.trim().to_ascii_lowercase().as_str() {
            "au" | "a.u." | "hartree" | "ha" => Some(Self::Hartree),
            "ev" => Some(Self::ElectronVolt),
            "cm-1" | "cm^-1" | "wavenumber" | "1/cm" => Some(Self::WaveNumber),
            _ => None,
        }
    }

    /// Convert a value in this unit to Hartree.
    pub fn to_au(self, value: f64) -> f64 {
        match self {
            Self::Hartree => value,
            Self::ElectronVolt => value / EV_PER_HARTREE,
            Self::WaveNumber => value / CM1_PER_HARTREE,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Hartree => "au",
            Self::ElectronVolt => "eV",
            Self::WaveNumber => "cm-1",
        }
    }
}

/// Femtoseconds to atomic units.
pub fn fs_to_au(t_fs: f64) -> f64 {
    t_fs * FS_TO_AU
}

/// Atomic units of time to femtoseconds.
pub fn au_to_fs(t_au: f64) -> f64 {
    t_au / FS_TO_AU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ev_round_trip() {
        let e = EnergyUnit::ElectronVolt;
        let au = e.to_au(27.211_386_245_988);
        assert!((au - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_labels() {
        assert_eq!(EnergyUnit::parse("eV"), Some(EnergyUnit::ElectronVolt));
        assert_eq!(EnergyUnit::parse("cm-1"), Some(EnergyUnit::WaveNumber));
        assert_eq!(EnergyUnit::parse("au"), Some(EnergyUnit::Hartree));
        assert_eq!(EnergyUnit::parse("kcal/mol"), None);
    }

    #[test]
    fn femtosecond_scale() {
        // 1 fs is a bit over 41 atomic time units.
        assert!((fs_to_au(1.0) - 41.341_373_335).abs() < 1e-6);
        assert!((au_to_fs(fs_to_au(123.4)) - 123.4).abs() < 1e-12);
    }
}
