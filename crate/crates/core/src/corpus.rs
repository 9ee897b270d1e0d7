//! The bundled fans and morphisms the verification suites run on.

use std::sync::Arc;

use crate::fan::{star_subdivision, Cone, Fan, ToricMorphism};
use crate::lattice::LatticeMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct NamedMorphism {
    pub name: String,
    pub morphism: ToricMorphism,
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub fans: Vec<Arc<Fan>>,
    pub morphisms: Vec<NamedMorphism>,
}

impl Corpus {
    /// P1, P2, P1xP1, BlP2, F1, P3 with the blow-down, both projections of
    /// P1xP1 and the ruling of F1.
    pub fn builtin() -> Corpus {
        let p1 = Arc::new(Fan::projective_space(1));
        let p2 = Arc::new(Fan::projective_space(2));
        let p1xp1 = Arc::new(p1.product(&p1).with_name("P1xP1"));
        let blowup = star_subdivision(&p2, &Cone::new([0, 1])).expect("P2 blows up at a fixed point");
        let blp2 = Arc::new((*blowup.fan).clone().with_name("BlP2"));
        let f1 = Arc::new(Fan::hirzebruch(1));
        let p3 = Arc::new(Fan::projective_space(3));

        let morphism = |name: &str, source: &Arc<Fan>, target: &Arc<Fan>, rows: &[Vec<i64>]| NamedMorphism {
            name: name.to_string(),
            morphism: ToricMorphism::new(
                source.clone(),
                target.clone(),
                LatticeMatrix::from_rows(rows, source.dim()),
            )
            .expect("corpus morphism shape"),
        };
        let morphisms = vec![
            morphism("blowdown", &blp2, &p2, &[vec![1, 0], vec![0, 1]]),
            morphism("P1xP1-first", &p1xp1, &p1, &[vec![1, 0]]),
            morphism("P1xP1-second", &p1xp1, &p1, &[vec![0, 1]]),
            morphism("F1-ruling", &f1, &p1, &[vec![1, 0]]),
        ];
        Corpus { fans: vec![p1, p2, p1xp1, blp2, f1, p3], morphisms }
    }

    pub fn fan(&self, name: &str) -> Option<&Arc<Fan>> {
        self.fans.iter().find(|f| f.name() == name)
    }

    pub fn morphism(&self, name: &str) -> Option<&NamedMorphism> {
        self.morphisms.iter().find(|m| m.name == name)
    }

    /// Every fan must be smooth and complete and every morphism compatible.
    pub fn check(&self) -> Result<()> {
        for fan in &self.fans {
            fan.require_smooth_complete()?;
        }
        for m in &self.morphisms {
            m.morphism.source().require_smooth_complete()?;
            if !m.morphism.is_compatible() {
                return Err(Error::IncompatibleMorphism(m.name.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_corpus_is_sound() {
        let corpus = Corpus::builtin();
        corpus.check().unwrap();
        let max: Vec<(String, usize)> =
            corpus.fans.iter().map(|f| (f.name().to_string(), f.max_cones().len())).collect();
        let expected = [("P1", 2), ("P2", 3), ("P1xP1", 4), ("BlP2", 4), ("F1", 4), ("P3", 4)];
        assert_eq!(max, expected.iter().map(|(n, k)| (n.to_string(), *k)).collect::<Vec<_>>());
    }
}
