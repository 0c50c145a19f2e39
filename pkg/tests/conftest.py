import pytest

from mepack.packets import PacketMoments


@pytest.fixture
def sym_packet():
    return PacketMoments.symbolic()


@pytest.fixture
def numeric_packet():
    # nu = 2 * 1.2 * 1.5 / 1 = 3.6
    return PacketMoments(0.7, -0.3, 1.2, 1.5, hbar=1.0)
