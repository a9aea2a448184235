//! The scripted instructor: plants a misunderstanding, watches the task
//! condition on every object, and extends the goal with one correction when
//! the agent interacts with the wrong one.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::Task;
use crate::grammar::{
    extend_goal, form_for, generate_correction, generate_instruction, negation_form_for, parse_utterance,
    Beginning, GrammarError, Lexicon, ObjectDescription, SemanticGoal, SynonymChoice, Utterance,
};
use crate::world::{detect_interaction, evaluate_condition, SceneState, WorldConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    None,
    Ambiguity,
    CommonGround,
    InstructionCorrection,
}

impl ScenarioKind {
    pub const CORRECTION_KINDS: [ScenarioKind; 3] = [
        ScenarioKind::Ambiguity,
        ScenarioKind::CommonGround,
        ScenarioKind::InstructionCorrection,
    ];
}

/// AC names a property of the intended object; ACN negates a property of
/// the object the agent wrongly interacted with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum CorrectionMode {
    #[default]
    #[serde(rename = "AC", alias = "ac")]
    Ac,
    #[serde(rename = "ACN", alias = "acn")]
    Acn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    /// The correction is part of the initial goal.
    Immediate,
    /// The correction follows a wrong-object interaction.
    #[default]
    OnInteraction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstructorError {
    #[error("scene does not support a {0:?} scenario")]
    Incompatible(ScenarioKind),
    #[error("intended target {0} is not in the scene")]
    UnknownTarget(usize),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioRequest {
    pub kind: ScenarioKind,
    pub mode: CorrectionMode,
    pub timing: Timing,
    pub delay_steps: u32,
    pub task: Task,
    pub intended_target: usize,
}

/// A correction that has been decided but is waiting out its delay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledCorrection {
    pub due_step: u32,
    pub trigger: usize,
    pub fragment: ObjectDescription,
    pub utterance: Utterance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionEvent {
    pub step_issued: u32,
    pub trigger_object: Option<usize>,
    pub correction_utterance: Utterance,
    pub combined_goal: SemanticGoal,
}

/// The instructor's private view of an episode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub intended_target: usize,
    /// Semantics of the initial instruction as the listener parses it.
    pub instruction_goal: SemanticGoal,
    pub instruction_utterance: Utterance,
    pub correction_mode: CorrectionMode,
    pub timing: Timing,
    pub delay_steps: u32,
    pub correction_issued: bool,
    pub corrected_goal: Option<SemanticGoal>,
    /// The object an instruction correction wrongly names.
    pub named_object: Option<usize>,
    pub scheduled: Option<ScheduledCorrection>,
    /// Current goal text, the instruction possibly extended by a correction.
    pub goal_utterance: Utterance,
}

/// Objects satisfying a description, in id order.
pub fn matching_objects(desc: &ObjectDescription, scene: &SceneState) -> Vec<usize> {
    scene
        .objects
        .iter()
        .filter(|o| desc.matches(o.color, o.shape))
        .map(|o| o.id)
        .collect()
}

/// Objects satisfying the instruction merged with an optional correction.
pub fn resolve_target_set(
    instruction: &ObjectDescription,
    correction: Option<&ObjectDescription>,
    scene: &SceneState,
) -> Vec<usize> {
    match correction {
        Some(c) => matching_objects(&instruction.merge(c), scene),
        None => matching_objects(instruction, scene),
    }
}

/// Semantic content of a correction for `intended`, or `None` if no
/// correction of this mode resolves uniquely.
///
/// AC uses the intended object's color alone when that identifies it both
/// on its own and merged with the instruction, else color and shape. ACN
/// negates the trigger's color, else its shape, whichever the intended
/// object lacks and leaves a unique merged match.
pub fn plan_correction(
    instruction: &ObjectDescription,
    scene: &SceneState,
    intended: usize,
    trigger: usize,
    mode: CorrectionMode,
) -> Option<ObjectDescription> {
    let t = scene.objects.get(intended)?;
    let unique = |d: &ObjectDescription| matching_objects(d, scene) == [intended];
    match mode {
        CorrectionMode::Ac => [
            ObjectDescription::color(t.color),
            ObjectDescription::color_shape(t.color, t.shape),
        ]
        .into_iter()
        .find(|c| unique(c) && unique(&instruction.merge(c))),
        CorrectionMode::Acn => {
            let x = scene.objects.get(trigger)?;
            let mut candidates = Vec::new();
            if x.color != t.color {
                candidates.push(ObjectDescription::not_color(x.color));
            }
            if x.shape != t.shape {
                candidates.push(ObjectDescription::not_shape(x.shape));
            }
            candidates.into_iter().find(|c| unique(&instruction.merge(c)))
        }
    }
}

/// Attribute slots of the intended object shared with exactly one other
/// object, as underspecified instructions.
fn ambiguous_descriptions(scene: &SceneState, intended: usize) -> Vec<(ObjectDescription, usize)> {
    let t = &scene.objects[intended];
    [ObjectDescription::color(t.color), ObjectDescription::shape(t.shape)]
        .into_iter()
        .filter_map(|d| {
            let m = matching_objects(&d, scene);
            if m.len() == 2 {
                let other = if m[0] == intended { m[1] } else { m[0] };
                Some((d, other))
            } else {
                None
            }
        })
        .collect()
}

fn common_ground_description(scene: &SceneState, intended: usize) -> ObjectDescription {
    let t = &scene.objects[intended];
    ObjectDescription {
        color: Some(crate::grammar::ColorTerm::Unknown),
        shape: Some(t.shape),
        ..Default::default()
    }
}

/// Candidate instructions for a kind, each with the objects that may
/// trigger a correction under it. Empty when the scene does not support
/// the kind in this mode.
fn instruction_candidates(
    scene: &SceneState,
    intended: usize,
    kind: ScenarioKind,
    mode: CorrectionMode,
) -> Vec<(ObjectDescription, Vec<usize>)> {
    let t = &scene.objects[intended];
    let others: Vec<usize> = (0..scene.objects.len()).filter(|&i| i != intended).collect();
    let all_correctable = |instr: &ObjectDescription, triggers: &[usize]| {
        triggers
            .iter()
            .all(|&x| plan_correction(instr, scene, intended, x, mode).is_some())
    };
    match kind {
        ScenarioKind::None => {
            let forms = [
                ObjectDescription::color_shape(t.color, t.shape),
                ObjectDescription::shape(t.shape),
                ObjectDescription::color(t.color),
            ];
            forms
                .into_iter()
                .filter(|d| matching_objects(d, scene) == [intended])
                .map(|d| (d, Vec::new()))
                .collect()
        }
        ScenarioKind::Ambiguity => ambiguous_descriptions(scene, intended)
            .into_iter()
            .filter(|(d, other)| all_correctable(d, &[*other]))
            .map(|(d, other)| (d, vec![other]))
            .collect(),
        ScenarioKind::InstructionCorrection => others
            .iter()
            .map(|&w| {
                let o = &scene.objects[w];
                (ObjectDescription::color_shape(o.color, o.shape), vec![w])
            })
            .filter(|(d, ws)| matching_objects(d, scene) == *ws && all_correctable(d, ws))
            .collect(),
        ScenarioKind::CommonGround => {
            let d = common_ground_description(scene, intended);
            if all_correctable(&d, &others) {
                vec![(d, others)]
            } else {
                Vec::new()
            }
        }
    }
}

/// Whether `build_scenario` can succeed for this scene.
pub fn scenario_feasible(scene: &SceneState, intended: usize, kind: ScenarioKind, mode: CorrectionMode) -> bool {
    intended < scene.objects.len() && !instruction_candidates(scene, intended, kind, mode).is_empty()
}

fn render_correction<R: Rng + ?Sized>(
    lexicon: &Lexicon,
    task: Task,
    fragment: &ObjectDescription,
    mode: CorrectionMode,
    rng: &mut R,
) -> Result<Utterance, GrammarError> {
    let (beginning, form) = match mode {
        CorrectionMode::Ac => {
            let pick = rng.gen_range(0..=lexicon.excuses.len());
            let beginning = if pick == lexicon.excuses.len() { Beginning::Edit } else { Beginning::Excuse(pick) };
            (beginning, form_for(fragment))
        }
        CorrectionMode::Acn => (Beginning::Negation, negation_form_for(fragment)),
    };
    let form = form.ok_or_else(|| GrammarError::Contract("empty correction".into()))?;
    let shape = fragment.shape.or_else(|| fragment.not_shapes.iter().next().copied());
    let choice = SynonymChoice::random(lexicon, task, shape, rng);
    generate_correction(lexicon, fragment, beginning, form, choice)
}

/// Chooses the instruction (and, for immediate timing, the correction) for
/// a sampled scene.
pub fn build_scenario<R: Rng + ?Sized>(
    scene: &SceneState,
    req: &ScenarioRequest,
    lexicon: &Lexicon,
    rng: &mut R,
) -> Result<(ScenarioSpec, Utterance), InstructorError> {
    let intended = req.intended_target;
    if intended >= scene.objects.len() {
        return Err(InstructorError::UnknownTarget(intended));
    }
    let candidates = instruction_candidates(scene, intended, req.kind, req.mode);
    let (description, triggers) = candidates
        .choose(rng)
        .cloned()
        .ok_or(InstructorError::Incompatible(req.kind))?;

    let form = form_for(&description).expect("instruction has an attribute");
    let mut choice = SynonymChoice::random(lexicon, req.task, description.shape, rng);
    let spoken = if req.kind == ScenarioKind::CommonGround {
        choice.rare_color = true;
        ObjectDescription::color_shape(scene.objects[intended].color, scene.objects[intended].shape)
    } else {
        description.clone()
    };
    let instruction_utterance =
        generate_instruction(lexicon, &SemanticGoal::new(req.task, spoken), form, choice)?;
    let instruction_goal = parse_utterance(&instruction_utterance, lexicon)?.instruction;
    debug_assert_eq!(instruction_goal.object, description);

    let mut spec = ScenarioSpec {
        kind: req.kind,
        intended_target: intended,
        instruction_goal,
        instruction_utterance: instruction_utterance.clone(),
        correction_mode: req.mode,
        timing: req.timing,
        delay_steps: req.delay_steps,
        correction_issued: false,
        corrected_goal: None,
        named_object: (req.kind == ScenarioKind::InstructionCorrection).then(|| triggers[0]),
        scheduled: None,
        goal_utterance: instruction_utterance,
    };

    if req.kind != ScenarioKind::None && req.timing == Timing::Immediate {
        let contrast = *triggers.choose(rng).ok_or(InstructorError::Incompatible(req.kind))?;
        let fragment = plan_correction(&spec.instruction_goal.object, scene, intended, contrast, req.mode)
            .ok_or(InstructorError::Incompatible(req.kind))?;
        let correction = render_correction(lexicon, req.task, &fragment, req.mode, rng)?;
        spec.corrected_goal = Some(spec.instruction_goal.with_correction(&fragment));
        spec.goal_utterance = extend_goal(&spec.goal_utterance, &correction);
        spec.correction_issued = true;
    }
    let initial = spec.goal_utterance.clone();
    Ok((spec, initial))
}

impl ScenarioSpec {
    pub fn task(&self) -> Task {
        self.instruction_goal.task
    }

    /// The goal as currently stated (instruction merged with any correction).
    pub fn current_goal(&self) -> &SemanticGoal {
        self.corrected_goal.as_ref().unwrap_or(&self.instruction_goal)
    }

    /// A correction is still expected by design.
    pub fn correction_pending(&self) -> bool {
        self.kind != ScenarioKind::None && self.timing == Timing::OnInteraction && !self.correction_issued
    }

    /// Whether an interaction with `object` is one the instructor answers.
    fn triggers_on(&self, object: usize, scene: &SceneState) -> bool {
        if object == self.intended_target {
            return false;
        }
        match self.kind {
            ScenarioKind::None => false,
            ScenarioKind::Ambiguity => matching_objects(&self.instruction_goal.object, scene).contains(&object),
            ScenarioKind::InstructionCorrection => self.named_object == Some(object),
            ScenarioKind::CommonGround => true,
        }
    }

    /// Observes the post-action state; returns the correction issued on
    /// this step, if any. At most one correction is ever issued.
    pub fn tick<R: Rng + ?Sized>(
        &mut self,
        scene: &SceneState,
        lexicon: &Lexicon,
        world: &WorldConfig,
        rng: &mut R,
    ) -> Option<CorrectionEvent> {
        if !self.correction_pending() {
            return None;
        }
        if self.scheduled.is_none() {
            let x = detect_interaction(scene, self.task(), world)?;
            if !self.triggers_on(x, scene) {
                return None;
            }
            let fragment = plan_correction(
                &self.instruction_goal.object,
                scene,
                self.intended_target,
                x,
                self.correction_mode,
            )?;
            let utterance = render_correction(lexicon, self.task(), &fragment, self.correction_mode, rng).ok()?;
            self.scheduled = Some(ScheduledCorrection {
                due_step: scene.step_count + self.delay_steps,
                trigger: x,
                fragment,
                utterance,
            });
        }
        let due = self.scheduled.as_ref().is_some_and(|s| scene.step_count >= s.due_step);
        if !due {
            return None;
        }
        let sched = self.scheduled.take()?;
        let combined = self.instruction_goal.with_correction(&sched.fragment);
        self.corrected_goal = Some(combined.clone());
        self.goal_utterance = extend_goal(&self.goal_utterance, &sched.utterance);
        self.correction_issued = true;
        Some(CorrectionEvent {
            step_issued: scene.step_count,
            trigger_object: Some(sched.trigger),
            correction_utterance: sched.utterance,
            combined_goal: combined,
        })
    }

    /// Sparse reward: 0 when the task condition holds on the object the
    /// current goal identifies, −1 otherwise. While a correction is still
    /// due, only the intended object counts, and only if the instruction
    /// admits it.
    pub fn reward(&self, scene: &SceneState, world: &WorldConfig) -> i32 {
        let task = self.task();
        let holds = |id: usize| evaluate_condition(scene, id, task, world).unwrap_or(false);
        let success = if self.correction_pending() {
            let t = self.intended_target;
            holds(t) && matching_objects(&self.instruction_goal.object, scene).contains(&t)
        } else {
            match matching_objects(&self.current_goal().object, scene).as_slice() {
                [only] => holds(*only),
                _ => false,
            }
        };
        if success {
            0
        } else {
            -1
        }
    }
}
