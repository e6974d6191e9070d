use crate::literal::VarIndex;
use crate::model_set::ModelSet;

/// Greedy minimization of a model set under `holds`.
///
/// Repeats until neither step applies: drop single models (first), then
/// project out single variables while `n` stays at least `min_n`. Every
/// accepted candidate satisfies `holds`, so the result does whenever the
/// input does.
pub fn shrink(
    instance: &ModelSet,
    min_n: usize,
    mut holds: impl FnMut(&ModelSet) -> bool,
) -> ModelSet {
    let mut current = instance.clone();
    loop {
        let mut progressed = false;
        let mut i = 0;
        while i < current.len() {
            match current.without_model(i) {
                Some(smaller) if holds(&smaller) => {
                    current = smaller;
                    progressed = true;
                }
                _ => i += 1,
            }
        }
        if current.n() > min_n {
            for v in 1..=current.n() {
                let projected = current.project_out(VarIndex::new(v as u32));
                if holds(&projected) {
                    current = projected;
                    progressed = true;
                    break;
                }
            }
        }
        if !progressed {
            return current;
        }
    }
}
