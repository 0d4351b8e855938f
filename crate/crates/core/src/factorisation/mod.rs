//! Exponent maps, the factorisation homomorphism and the monoid `Z(H)`.

mod atomic;
mod checks;
mod exponent_map;
mod zmonoid;

pub use atomic::{atom, is_valid_id, window_atoms, Atomic};
pub use checks::{
    exponent_divides, factorisation_report, order_ideal_check, topologically_prime_check,
    unique_factorisation_check, xi_section_check, zh_add, zh_atoms_check, zh_net_convergence,
    AtomsCheck, ExponentDivides, FactorisationReport, NetCheck, OrderIdealReport, XiReport,
    ZAddReport,
};
pub use exponent_map::{AtomId, ExponentMap};
pub use zmonoid::{atom_stream, chi, pi_bar, pi_finite, xi, ZMembershipReport, ZMonoid, ZVerdict};
