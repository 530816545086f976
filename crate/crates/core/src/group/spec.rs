use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generators of a permutation group as cycle decompositions on `0..degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<Vec<usize>>>,
}

/// On-disk form: identical shape, but points are 1-based.
#[derive(Serialize, Deserialize)]
struct GroupFile {
    name: String,
    degree: usize,
    generators: Vec<Vec<Vec<usize>>>,
}

impl GroupSpec {
    pub fn new(name: &str, degree: usize, generators: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let spec = GroupSpec { name: name.to_string(), degree, generators };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses the 1-based JSON format and converts to 0-based points.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(text).map_err(|e| {
            Error::InvalidSpec(format!("line {} column {}: {}", e.line(), e.column(), e))
        })?;
        let mut gens = Vec::with_capacity(file.generators.len());
        for (gi, g) in file.generators.iter().enumerate() {
            let mut cycles = Vec::with_capacity(g.len());
            for (ci, c) in g.iter().enumerate() {
                let mut cyc = Vec::with_capacity(c.len());
                for &pt in c {
                    if pt == 0 {
                        return Err(Error::InvalidSpec(format!(
                            "generators[{gi}][{ci}]: points are 1-based, found 0"
                        )));
                    }
                    if pt > file.degree {
                        return Err(Error::DegreeMismatch { point: pt, degree: file.degree });
                    }
                    cyc.push(pt - 1);
                }
                cycles.push(cyc);
            }
            gens.push(cycles);
        }
        GroupSpec::new(&file.name, file.degree, gens)
    }

    pub fn to_json(&self) -> String {
        let file = GroupFile {
            name: self.name.clone(),
            degree: self.degree,
            generators: self
                .generators
                .iter()
                .map(|g| g.iter().map(|c| c.iter().map(|p| p + 1).collect()).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("group spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidSpec("degree must be positive".into()));
        }
        for (gi, g) in self.generators.iter().enumerate() {
            let mut seen = vec![false; self.degree];
            for (ci, c) in g.iter().enumerate() {
                if c.is_empty() {
                    return Err(Error::InvalidSpec(format!("generators[{gi}][{ci}]: empty cycle")));
                }
                for &pt in c {
                    if pt >= self.degree {
                        return Err(Error::DegreeMismatch { point: pt + 1, degree: self.degree });
                    }
                    if seen[pt] {
                        return Err(Error::InvalidSpec(format!(
                            "generators[{gi}]: point {} repeated",
                            pt + 1
                        )));
                    }
                    seen[pt] = true;
                }
            }
        }
        Ok(())
    }

    /// Image arrays of the generators.
    pub fn images(&self) -> Vec<Vec<u32>> {
        self.generators
            .iter()
            .map(|g| {
                let mut img: Vec<u32> = (0..self.degree as u32).collect();
                for c in g {
                    for i in 0..c.len() {
                        img[c[i]] = c[(i + 1) % c.len()] as u32;
                    }
                }
                img
            })
            .collect()
    }
}
