//! Dessins d'enfants as permutation pairs.
//!
//! - [`perm`]: permutations, cycle types, cycle notation.
//! - [`dessin`]: passports, canonical forms, enumeration.
//! - [`group`]: stabilizer chains, automorphism groups, blocks.
//! - [`counting`]: exact census formulas and their brute-force oracles.
//! - [`constructions`]: explicit families of dessins.
//! - [`search`]: certificates of trivial automorphism group.
//!
//! Permutations act on the left: `(p * q)(e) = p(q(e))`. Points are 1-based
//! everywhere in the public API and in text formats.

pub mod constructions;
pub mod counting;
pub mod dessin;
pub mod group;
pub mod perm;
pub mod search;

pub use constructions::{alternating_witness, genus0_dessin, regular_exists, regular_tree_dessin, Genus0Kind, TreeSpec};
pub use counting::{CountError, CountReport};
pub use dessin::{passports_of_degree, canonical_form, enumerate_dessins, Dessin, DessinError, DessinJson, EnumConfig, Passport};
pub use group::{automorphism_group, group_order, is_primitive, is_regular, BlockSystem, GroupError, GroupHandle};
pub use perm::{CycleType, PermError, Permutation};
pub use search::{certify, search_trivial_aut, Conclusion, Evidence, GroupWord, SearchConfig, WitnessCertificate};
