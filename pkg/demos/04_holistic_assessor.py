"""
Adding a vision-language assessor
=================================

The quantitative verdict can be handed, together with the rendered heatmap,
to a chat-completions endpoint that makes the final call. Offline, a scripted
transport stands in for the endpoint. To use a real one, replace the
``MockTransport`` with ``HttpTransport(config)`` and export the API key in
the variable named by ``config.api_key_env``.
"""

import numpy as np

from simverify import Assessor, verify
from simverify.holistic import AssessorConfig, MockTransport, build_prompt
from simverify.synth import SyntheticSpec, generate

config = AssessorConfig(max_retries=2, timeout=5.0)

# %%
# The first request fails and the second answers FALSE.
transport = MockTransport([{"error": "HTTP 503 Service Unavailable"}, "FALSE"])
m, _ = generate(SyntheticSpec("concentrated", seed=11))
verdict = verify(m, assessor=Assessor(config, transport))

print("quantitative:", verdict.quantitative_decision)
print("assessor:", verdict.holistic.decision, f"after {verdict.holistic.attempts} attempts")
print("final:", verdict.final_decision)
print("rationale:", verdict.rationale)

# %%
# The prompt that was sent:
print()
print(build_prompt(verdict.scores))

# %%
# With every attempt failing the quantitative verdict stands.
down = MockTransport([{"error": "connection refused"}] * 3)
fallback = verify(np.full((24, 24), 0.1), assessor=Assessor(config, down))
print()
print("final:", fallback.final_decision, "-", fallback.rationale)
