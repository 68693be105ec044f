"""Tests for additive attention pooling."""
import pytest
import torch

from newsrec.models.attention import AdditiveAttention, PersonalizedAttention, additive_attention


def params(h=8, a=6, dtype=torch.float32):
    return (
        torch.randn(a, h, dtype=dtype),
        torch.randn(a, dtype=dtype),
        torch.randn(a, dtype=dtype),
    )


def test_identical_rows():
    row = torch.randn(8)
    H = row.repeat(5, 1)
    pooled, weights = additive_attention(H, torch.ones(5, dtype=torch.bool), *params())
    torch.testing.assert_close(pooled, row)
    torch.testing.assert_close(weights, torch.full((5,), 0.2))


def test_single_position():
    H = torch.randn(1, 8)
    pooled, weights = additive_attention(H, torch.ones(1, dtype=torch.bool), *params())
    torch.testing.assert_close(pooled, H[0])
    assert weights.item() == 1.0


def test_weights_are_distribution_over_valid_positions():
    H = torch.randn(3, 7, 8)
    mask = torch.tensor(
        [[1, 1, 1, 1, 1, 1, 1], [1, 1, 0, 0, 0, 0, 0], [0, 0, 0, 1, 0, 1, 0]], dtype=torch.bool
    )
    pooled, weights = additive_attention(H, mask, *params())
    assert torch.allclose(weights.sum(-1), torch.ones(3), atol=1e-6)
    assert (weights >= 0).all()
    assert (weights[~mask] == 0).all()
    # Inside the convex hull: every coordinate between the valid rows' min and max.
    for b in range(3):
        valid = H[b][mask[b]]
        assert (pooled[b] >= valid.min(0).values - 1e-6).all()
        assert (pooled[b] <= valid.max(0).values + 1e-6).all()


def test_all_masked_is_an_error():
    with pytest.raises(ValueError):
        additive_attention(torch.randn(2, 4, 8), torch.zeros(2, 4, dtype=torch.bool), *params())


def test_gradient_matches_finite_differences():
    H = torch.randn(5, 8, dtype=torch.float64, requires_grad=True)
    W, b, q = (p.requires_grad_() for p in params(dtype=torch.float64))
    mask = torch.tensor([True, True, False, True, True])

    def pooled(H, W, b, q):
        return additive_attention(H, mask, W, b, q)[0]

    assert torch.autograd.gradcheck(pooled, (H, W, b, q), eps=1e-6, atol=1e-7, rtol=1e-4)


def test_module_default_mask():
    attention = AdditiveAttention(8, 4)
    pooled, weights = attention(torch.randn(2, 3, 8))
    assert pooled.shape == (2, 8)
    assert torch.allclose(weights.sum(-1), torch.ones(2), atol=1e-6)


def test_personalized_query_changes_weights():
    attention = PersonalizedAttention(8, 4)
    H = torch.randn(1, 5, 8).repeat(2, 1, 1)
    mask = torch.ones(2, 5, dtype=torch.bool)
    query = torch.tensor([[3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -3.0]])
    _, weights = attention(H, mask, query)
    assert not torch.allclose(weights[0], weights[1])
