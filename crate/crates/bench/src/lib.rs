// SPDX-License-Identifier: Apache-2.0

//! Benchmark fixtures. The benches themselves live in `benches/`.

use cheb_core::{character_group, DirichletCharacter};

/// The nonprincipal character mod 4.
pub fn chi4() -> DirichletCharacter {
    character_group(4).expect("mod 4").swap_remove(1)
}

/// A complex character mod 5.
pub fn chi5_complex() -> DirichletCharacter {
    character_group(5).expect("mod 5").into_iter().find(|c| !c.is_real()).expect("complex character")
}
