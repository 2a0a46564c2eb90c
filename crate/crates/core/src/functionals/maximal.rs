use crate::grid::{coarsen, GridFunction, Window};

/// Dyadic maximal function: at each cell, the largest average of `|f|` over
/// the half-space cubes of the window containing it.
pub fn hl_maximal(f: &GridFunction) -> GridFunction {
    let w: &Window = f.window();
    let axes = w.axes();
    let j = w.depth;
    let fan = (1usize << axes) as f64;
    // Layer d holds the averages over the 2^{d(n+1)} cubes of depth d.
    let mut layers: Vec<Vec<f64>> = vec![f.abs()];
    for d in (0..j).rev() {
        let fine = layers.last().expect("non-empty");
        let mut coarse = vec![0.0; 1 << (d as usize * axes)];
        for (i, v) in fine.iter().enumerate() {
            coarse[coarsen(i, axes, d + 1, d)] += v;
        }
        for v in &mut coarse {
            *v /= fan;
        }
        layers.push(coarse);
    }
    layers.reverse();
    let mut best = layers[0].clone();
    for d in 1..=j {
        best = layers[d as usize]
            .iter()
            .enumerate()
            .map(|(i, &v)| v.max(best[coarsen(i, axes, d, d - 1)]))
            .collect();
    }
    GridFunction::from_values(w.clone(), best.into_iter().map(Into::into).collect())
        .expect("one value per cell")
}
