use crate::error::{Error, Result};

const ENTRIES: &[(&str, &str)] = &[
    ("truncation", "O_F / p_F^l in digit form with the class of a uniformizer generating p_F / p_F^{l+1}; two fields are l-close when these data agree."),
    ("herbrand", "Herbrand functions phi = integral of dt / [G_0 : G_t] and psi = phi^{-1} of a Galois extension, computed from the lower ramification breaks; l(1) = psi(l) satisfies l <= l(1) <= e l, with equality on the right iff the extension is tame."),
    ("close", "An l-close pair F, F': an identification of the truncated data of F and F' sending the chosen uniformizer to the chosen uniformizer."),
    ("extension-transfer", "An extension E/F at most l-ramified transfers to E'/F' by carrying the coefficients of an Eisenstein (or residue) polynomial across the identification; E and E' are then l(1)-close."),
    ("deligne", "Deligne's isomorphism F^x / (1 + p_F^l) -> F'^x / (1 + p_F'^l), sending the uniformizer to the uniformizer and units digit-wise."),
    ("unit-inclusion", "For E/F with ramification index e, the inclusion F^x / (1 + p_F^l) -> E^x / (1 + p_E^{l(1)}) commutes with the Deligne isomorphisms of F and E."),
    ("torus", "A torus over F is given by its character lattice X^*(T) with an action of Gal(L/F) for a splitting field L; T(L) = Hom(X^*(T), L^x)."),
    ("filtrations", "Naive filtration: points with val(chi(t) - 1) >= r for every character; standard: the naive filtration intersected with the parahoric part T(F)^0 = ker(kappa); minimal congruent: equal to the standard one for weakly induced tori at r > 0."),
    ("weil-restriction", "Res_{E/F} of a torus over E has the induced lattice; its F-points are the E-points of the original torus."),
    ("correspondence", "t in T(F) and t' in T'(F') are standard correspondents at level r when chi(t) and chi(t') match under the Deligne isomorphism of L and L' at level ceil(e r) for every character chi."),
    ("standard-isomorphism", "The unique isomorphism T(F)/T(F)_r -> T'(F')/T'(F')_r sending every element to a standard correspondent, when it exists; it is the restriction of the split-level isomorphism."),
    ("congruent-isomorphism", "At integer level m: an isomorphism induced by a standard isomorphism over the maximal unramified extensions; realized here at a finite unramified stage of degree f*."),
    ("functoriality", "Standard isomorphisms commute with the maps on points induced by morphisms of tori."),
    ("equivariance", "Over a splitting field, the split-level isomorphism commutes with the Galois action under the matched Galois groups."),
    ("kottwitz", "The Kottwitz homomorphism kappa: T(F) -> (X_*(T)_I)^Frob, valuation on split tori, computed through norms from the splitting field; standard isomorphisms are compatible with kappa on both sides."),
    ("level-reduction", "The standard isomorphism at level r induces the standard isomorphism at any level s <= r, and restricts to the bounded parts."),
    ("neron", "Out of scope: Neron models, their connected components and congruence group schemes are not implemented; the tool works with point groups and their filtrations only."),
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

pub fn explain(name: &str) -> Result<String> {
    let key = name.trim().to_lowercase().replace(['_', ' '], "-");
    ENTRIES
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(n, text)| format!("{n}: {text}"))
        .ok_or_else(|| Error::UnknownName(format!("'{name}'; available: {}", names().join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_and_unknown_names() {
        assert!(explain("herbrand").unwrap().contains("psi"));
        assert!(explain("Kottwitz").unwrap().contains("kappa"));
        assert!(explain("neron").unwrap().contains("Out of scope"));
        let err = explain("cohomology").unwrap_err().to_string();
        assert!(err.contains("available") && err.contains("kottwitz"));
    }
}
