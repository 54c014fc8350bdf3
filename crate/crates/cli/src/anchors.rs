//! Anchor keys attached to every check. Each key names the mathematical claim a
//! check exercises; `docs/anchors.md` carries the same table with the informal
//! statement of each claim.

pub const PLUMBING: &str = "plumbing";

pub const ANCHORS: &[(&str, &str)] = &[
    ("complement-duality", "K ↦ K′ (polar space for Im⟨·,·⟩) is an order-reversing involution exchanging ∧ and ∨"),
    ("standard-classification", "K is standard iff K∩iK = {0} and K+iK is the whole space"),
    ("modular-polar-decomposition", "the Tomita operator factors as s = jδ^{1/2}"),
    ("modular-conjugation-complement", "the modular conjugation maps K onto K′"),
    ("modular-flow-invariance", "δ^{it}K = K for every real t"),
    ("modular-spectrum-inversion", "the spectrum of δ is invariant under λ ↦ 1/λ"),
    ("fiber-spectrum", "the two-dimensional fiber at angle θ has δ-eigenvalues tan²(θ/2) and cot²(θ/2)"),
    ("angle-operator", "cos Θ = |δ−I|(δ+I)^{-1} recovers the fiber angle"),
    ("pairing-bound", "|Re⟨h,k⟩| ≤ √2/2 for unit h∈K and k∈Ker(j+I)"),
    ("graph-norm-ratio", "the graph norm ratio on K+Ker(j+I) stays above (√2−1)/√2"),
    ("skeleton-isotropy", "every block of a symplectic skeleton is isotropic"),
    ("skeleton-factor", "an even skeleton has trivial ω-radical"),
    ("skeleton-center", "the radical of an odd skeleton is the image of B_1 under the alternating involutions"),
    ("crossproduct-fixed-point", "M_1 ∩ B_1′ = M_0 (fixed points of the dual action)"),
    ("crossproduct-pairing", "the ω-pairing between B_0 and B_1 is non-degenerate"),
    ("itpfi-type", "a constant angle θ gives an infinite tensor product of type III_λ with λ = tan²(θ/2)"),
    ("itpfi-unknown", "non-constant angle sequences are left unclassified"),
    ("extension-divergence", "the constructed vector has divergent δ-weighted norm, so the extension is proper"),
    ("extension-membership", "the constructed vector has finite norm"),
    ("extension-infeasible", "constant-angle models admit no such extension"),
    ("vacuum-amplitude", "⟨e^0, W(h)e^0⟩ = exp(−‖h‖²/4)"),
    ("weyl-relation", "W(h)W(k) = exp(−(i/2)Im⟨h,k⟩)W(h+k)"),
    ("weyl-commutant", "W(h) and W(k) commute exactly when Im⟨h,k⟩ = 0, so R(K′) ⊂ R(K)′"),
    ("second-quantization", "Γ(A) = ⊕A^{⊗n} with ⟨e^f, Γ(A)e^g⟩ = exp⟨f, Ag⟩"),
    ("level-sum-decomposition", "M_{k+p} = M_k + Σ_j B_{k+j}"),
    ("relative-commutant-sum", "M_k′ ∩ M_{k+p} = Σ_j B_{k+j}"),
    ("b-commutative", "each B_k is ω-isotropic"),
    ("b-sum-factor", "an even number of consecutive B's spans a factor"),
    ("b-sum-center", "an odd number of consecutive B's has a center of dimension dim B"),
    ("two-step-commutant", "M_k′ ∩ M_{k+2} is commutative"),
    ("three-step-commutant", "M_k′ ∩ M_{k+3} is a factor"),
    ("infinite-irreducible-inclusions", "existence of infinite-dimensional irreducible standard inclusions"),
    ("extension-type-three-one", "type III_1 of the extensions built from vanishing angle sequences"),
    ("itpfi-factoriality", "factoriality proofs for the infinite tensor products"),
    ("non-regularity", "non-regularity of the limiting inclusion"),
    (PLUMBING, "reporting, parsing and determinism infrastructure"),
];

pub fn is_known(anchor: &str) -> bool {
    ANCHORS.iter().any(|(a, _)| *a == anchor)
}

/// Claims that cannot be settled by finite computation.
pub fn out_of_scope() -> Vec<crate::report::OutOfScope> {
    [
        ("infinite-irreducible-inclusions", "needs genuinely infinite-dimensional one-particle spaces"),
        ("extension-type-three-one", "a type classification is a statement about the infinite product"),
        ("itpfi-factoriality", "factoriality is not decidable on finite truncations"),
        ("non-regularity", "regularity concerns the limit of the whole tower"),
    ]
    .into_iter()
    .map(|(a, r)| crate::report::OutOfScope { anchor: a.into(), reason: r.into() })
    .collect()
}
