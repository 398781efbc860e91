import os

import hypothesis
import pytest

hypothesis.settings.register_profile("ci", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.register_profile("thorough", deadline=None, max_examples=1000)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def alphabets():
    return {2: ['ICMP', 'ARP'],
            4: ['ICMP', 'ARP', 'UDP', 'TCP'],
            8: ['ICMP', 'ARP', 'UDP', 'TCP', 'DNS', 'NTP', 'HTTP', 'SSH']}
