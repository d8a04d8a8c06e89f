//! Two-qubit state algebra: target states, mixtures, fidelity, concurrence
//! and local fiber rotations.

use pairlab::state::{
    apply_local_rotation, concurrence, fidelity, fidelity_pure, target_state, DensityMatrix, JonesMatrix, PureState,
};

fn main() -> pairlab::Result<()> {
    let (a, b) = (0.6f64.sqrt(), 0.4f64.sqrt());
    let psi = target_state(a, b)?;
    let rho = psi.projector();
    println!("target a|HH> + b|VV> with a^2 = 0.6:\n{rho}");
    println!("fidelity to Phi+       {:.4}", fidelity_pure(&rho, &PureState::phi_plus()));
    println!("concurrence            {:.4}", concurrence(&rho)?);

    // Mixing in white noise lowers purity and entanglement.
    let noisy = DensityMatrix::mixture(&[(0.8, rho.clone()), (0.2, DensityMatrix::maximally_mixed())])?;
    println!("80/20 mixture: purity {:.4}, concurrence {:.4}", noisy.purity(), concurrence(&noisy)?);

    // A fiber rotation changes the state but not its entanglement.
    let fiber = JonesMatrix::from_euler(0.3, 1.1, -0.4);
    let rotated = apply_local_rotation(&rho, &fiber, &JonesMatrix::identity())?;
    println!(
        "after a fiber on Alice's arm: fidelity to target {:.4}, concurrence {:.4}",
        fidelity(&rotated, &rho)?,
        concurrence(&rotated)?
    );
    println!("eigenvalues of the rotated state: {:?}", rotated.eigenvalues());
    Ok(())
}
