use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::EvolutionEquation;

/// The ten named equations of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogEquation {
    Heat,
    GurtinPipkin,
    ColemanGurtin,
    WeaklyDampedWave,
    StronglyDampedWave,
    Mgt,
    RegularizedMgt,
    MgtMemoryTypeI,
    MgtMemoryTypeII,
    FourthOrderMgt,
}

impl CatalogEquation {
    pub const ALL: [CatalogEquation; 10] = [
        CatalogEquation::Heat,
        CatalogEquation::GurtinPipkin,
        CatalogEquation::ColemanGurtin,
        CatalogEquation::WeaklyDampedWave,
        CatalogEquation::StronglyDampedWave,
        CatalogEquation::Mgt,
        CatalogEquation::RegularizedMgt,
        CatalogEquation::MgtMemoryTypeI,
        CatalogEquation::MgtMemoryTypeII,
        CatalogEquation::FourthOrderMgt,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CatalogEquation::Heat => "(i) heat equation",
            CatalogEquation::GurtinPipkin => "(ii) Gurtin-Pipkin heat equation",
            CatalogEquation::ColemanGurtin => "(iii) Coleman-Gurtin heat equation",
            CatalogEquation::WeaklyDampedWave => "(iv) weakly damped wave equation",
            CatalogEquation::StronglyDampedWave => "(v) strongly damped wave equation",
            CatalogEquation::Mgt => "(vi) MGT equation",
            CatalogEquation::RegularizedMgt => "(vii) regularized MGT equation",
            CatalogEquation::MgtMemoryTypeI => "(viii) MGT equation with memory of type I",
            CatalogEquation::MgtMemoryTypeII => "(ix) MGT equation with memory of type II",
            CatalogEquation::FourthOrderMgt => "(x) fourth-order equation of MGT type",
        }
    }

    /// Name of the shipped preset reproducing this equation.
    pub fn preset(self) -> &'static str {
        match self {
            CatalogEquation::Heat => "heat",
            CatalogEquation::GurtinPipkin => "gurtin-pipkin",
            CatalogEquation::ColemanGurtin => "coleman-gurtin",
            CatalogEquation::WeaklyDampedWave => "weakly-damped",
            CatalogEquation::StronglyDampedWave => "strongly-damped",
            CatalogEquation::Mgt => "mgt",
            CatalogEquation::RegularizedMgt => "mgt-regularized",
            CatalogEquation::MgtMemoryTypeI => "mgt-memory-1",
            CatalogEquation::MgtMemoryTypeII => "mgt-memory-2",
            CatalogEquation::FourthOrderMgt => "mgt4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Named(CatalogEquation),
    General { order: usize, memory: bool },
}

impl Classification {
    pub fn named(&self) -> Option<CatalogEquation> {
        match self {
            Classification::Named(c) => Some(*c),
            Classification::General { .. } => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Named(c) => f.write_str(c.label()),
            Classification::General { order, memory } => {
                write!(f, "general(order={order}, memory={memory})")
            }
        }
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn support(v: &[crate::rational::Rational]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, _)| j)
        .collect()
}

/// Matches the nonzero-coefficient pattern and memory structure against the
/// catalog. Values of the constants are irrelevant as long as they are
/// strictly positive once the equation is made monic.
pub fn classify(eq: &EvolutionEquation) -> Classification {
    use CatalogEquation::*;

    let eq = eq.localized().normalized().monic();
    let general = Classification::General {
        order: eq.time_order(),
        memory: eq.memory().is_some(),
    };
    let all_positive = eq
        .time_coeffs()
        .iter()
        .chain(eq.laplacian_coeffs())
        .all(|c| !c.is_negative());
    if !all_positive {
        return general;
    }
    let time = support(eq.time_coeffs());
    let lap = support(eq.laplacian_coeffs());
    let t = time.as_slice();
    let l = lap.as_slice();

    let named = match eq.memory() {
        None => match (t, l) {
            ([1], [0]) => Some(Heat),
            ([1, 2], [0]) => Some(WeaklyDampedWave),
            ([2], [0, 1]) => Some(StronglyDampedWave),
            ([2, 3], [0, 1]) => Some(Mgt),
            ([2, 3], [0, 1, 2]) => Some(RegularizedMgt),
            ([2, 3, 4], [0, 1, 2]) => Some(FourthOrderMgt),
            _ => None,
        },
        Some(m) => {
            let positive = m.weight.is_positive();
            match (t, l, m.convolved_derivative_order, positive) {
                ([1], [], 0, true) => Some(GurtinPipkin),
                ([1], [0], 0, true) => Some(ColemanGurtin),
                ([2, 3], [0, 1], 0, false) => Some(MgtMemoryTypeI),
                // integrated-kernel form: -κΔv + ∫ G Δ∂_t v with G ≥ 0
                ([2, 3], [1] | [0, 1], 0, true) => Some(MgtMemoryTypeII),
                ([2, 3], [0, 1], 1, false) => Some(MgtMemoryTypeII),
                _ => None,
            }
        }
    };
    named.map_or(general, Classification::Named)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::{EquationMemory, Kernel};
    use crate::rational::{int, Rational};

    fn eq(a: &[i64], b: &[i64], mem: Option<(i64, usize)>) -> EvolutionEquation {
        let v = |x: &[i64]| x.iter().map(|&c| int(c)).collect::<Vec<Rational>>();
        EvolutionEquation::new(
            1,
            v(a),
            v(b),
            mem.map(|(w, r)| EquationMemory {
                weight: int(w),
                kernel: Kernel::exponential(int(1)).unwrap(),
                convolved_derivative_order: r,
            }),
        )
        .unwrap()
    }

    #[test]
    fn named_patterns() {
        assert_eq!(classify(&eq(&[0, 1], &[5], None)).to_string(), "(i) heat equation");
        assert_eq!(
            classify(&eq(&[0, 3, 1], &[2], None)).to_string(),
            "(iv) weakly damped wave equation"
        );
        assert_eq!(
            classify(&eq(&[0, 0, 1], &[2, 3], None)).to_string(),
            "(v) strongly damped wave equation"
        );
        assert_eq!(classify(&eq(&[0, 0, 2, 1], &[1, 1], None)).named(), Some(CatalogEquation::Mgt));
        assert_eq!(
            classify(&eq(&[0, 0, 2, 1], &[1, 1, 1], None)).named(),
            Some(CatalogEquation::RegularizedMgt)
        );
        assert_eq!(
            classify(&eq(&[0, 0, 1, 2, 1], &[1, 1, 1], None)).named(),
            Some(CatalogEquation::FourthOrderMgt)
        );
        assert_eq!(
            classify(&eq(&[0, 1], &[], Some((1, 0)))).named(),
            Some(CatalogEquation::GurtinPipkin)
        );
        assert_eq!(
            classify(&eq(&[0, 1], &[1], Some((1, 0)))).named(),
            Some(CatalogEquation::ColemanGurtin)
        );
        assert_eq!(
            classify(&eq(&[0, 0, 1, 1], &[2, 1], Some((-1, 0)))).named(),
            Some(CatalogEquation::MgtMemoryTypeI)
        );
        assert_eq!(
            classify(&eq(&[0, 0, 1, 1], &[0, 1], Some((1, 0)))).named(),
            Some(CatalogEquation::MgtMemoryTypeII)
        );
        assert_eq!(
            classify(&eq(&[0, 0, 1, 1], &[1, 1], Some((-1, 1)))).named(),
            Some(CatalogEquation::MgtMemoryTypeII)
        );
    }

    #[test]
    fn shifted_variables_are_recognized() {
        // ∂_tt u_1 - κ Δ∂_t u_1 = 0 is the heat equation in u_0
        assert_eq!(classify(&eq(&[0, 0, 1], &[0, 4], None)).named(), Some(CatalogEquation::Heat));
    }

    #[test]
    fn dirac_memory_is_local() {
        let e = EvolutionEquation::new(
            0,
            vec![int(0), int(1)],
            vec![],
            Some(EquationMemory {
                weight: int(1),
                kernel: Kernel::Dirac,
                convolved_derivative_order: 0,
            }),
        )
        .unwrap();
        assert_eq!(classify(&e).named(), Some(CatalogEquation::Heat));
    }

    #[test]
    fn general_fallback() {
        let c = classify(&eq(&[0, 0, 0, 0, 0, 1], &[1], None));
        assert_eq!(c.to_string(), "general(order=5, memory=false)");
        let c = classify(&eq(&[0, -1, 1], &[1], None));
        assert!(c.named().is_none());
    }
}
