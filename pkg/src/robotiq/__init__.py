"""robotiq: command a simulated mobile manipulator in natural language.

Layered like the robot stack it models: `world` (geometry + maps),
`env` (navigation MDP), `rl` (policy-gradient training), `skills`
(robot function library), `planner` (language -> validated plans),
`service` (sessions, HTTP/WebSocket API, benchmark harness).
"""

__version__ = "0.1.0"
