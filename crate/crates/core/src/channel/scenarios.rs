use super::Deployment;

/// Named reference geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinScenario {
    /// Five BSs around one user.
    SingleUser,
    /// Six BSs serving three users.
    MultiUser,
}

pub const BUILTIN_SCENARIOS: [(&str, BuiltinScenario); 2] = [
    ("single-user", BuiltinScenario::SingleUser),
    ("multi-user", BuiltinScenario::MultiUser),
];

const SINGLE_BS: [[f64; 2]; 5] = [
    [37.96, -21.56],
    [-7.83, 13.33],
    [25.50, -22.49],
    [17.98, 25.00],
    [-26.34, 11.62],
];
const SINGLE_USERS: [[f64; 2]; 1] = [[4.0, -11.0]];

const MULTI_BS: [[f64; 2]; 6] = [
    [35.77, 22.69],
    [13.06, -37.45],
    [27.15, -26.33],
    [-40.28, -0.14],
    [-32.86, -28.65],
    [-5.10, 29.98],
];
const MULTI_USERS: [[f64; 2]; 3] = [[-11.0, 0.0], [3.0, 5.0], [2.0, -12.0]];

impl BuiltinScenario {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinScenario::SingleUser => "single-user",
            BuiltinScenario::MultiUser => "multi-user",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|&(_, s)| s)
    }

    pub fn bs_positions(self) -> &'static [[f64; 2]] {
        match self {
            BuiltinScenario::SingleUser => &SINGLE_BS,
            BuiltinScenario::MultiUser => &MULTI_BS,
        }
    }

    pub fn user_positions(self) -> &'static [[f64; 2]] {
        match self {
            BuiltinScenario::SingleUser => &SINGLE_USERS,
            BuiltinScenario::MultiUser => &MULTI_USERS,
        }
    }
}

/// Built-in geometry with uniform antenna counts.
pub fn builtin_scenario(
    kind: BuiltinScenario,
    bs_antennas: usize,
    user_antennas: usize,
) -> Deployment {
    let bs = kind.bs_positions().to_vec();
    let users = kind.user_positions().to_vec();
    let (kb, ku) = (bs.len(), users.len());
    Deployment::new(bs, vec![bs_antennas; kb], users, vec![user_antennas; ku])
        .expect("built-in geometry is valid")
}
