#include "kernelcur/sft.hpp"

namespace kernelcur::sft {

namespace {

constexpr const char* kBuiltinText = R"(You write custom CUDA kernels that replace PyTorch operators in a model to make it run faster.
Any subset of operators may be replaced. Fusing several operators into one kernel or changing the algorithm are both allowed.

Example input architecture:
```
$ref_arch_torch
```

The same architecture rewritten with an inline CUDA kernel:
```
$ref_arch_kernel
```

Architecture to optimize:
```
$code
```
Rewrite the class named Model using custom CUDA kernels and name the result ModelNew. Reply with complete, compilable code in a single code block and nothing else.
)";

constexpr const char* kBuiltinTorch = R"(import torch
import torch.nn as nn


class Model(nn.Module):
    def __init__(self) -> None:
        super().__init__()

    def forward(self, a, b):
        return a + b


def get_inputs():
    return [torch.randn(1, 128).cuda(), torch.randn(1, 128).cuda()]


def get_init_inputs():
    return []
)";

constexpr const char* kBuiltinKernel = R"(import torch
import torch.nn as nn
from torch.utils.cpp_extension import load_inline

source = """
#include <torch/extension.h>
#include <cuda_runtime.h>

__global__ void add_kernel(const float* a, const float* b, float* out, int n) {
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < n) {
        out[i] = a[i] + b[i];
    }
}

torch::Tensor add_cuda(torch::Tensor a, torch::Tensor b) {
    auto out = torch::empty_like(a);
    int n = a.numel();
    const int block = 256;
    add_kernel<<<(n + block - 1) / block, block>>>(
        a.data_ptr<float>(), b.data_ptr<float>(), out.data_ptr<float>(), n);
    return out;
}
"""

add = load_inline(
    name="add",
    cpp_sources="torch::Tensor add_cuda(torch::Tensor a, torch::Tensor b);",
    cuda_sources=source,
    functions=["add_cuda"],
)


class ModelNew(nn.Module):
    def __init__(self) -> None:
        super().__init__()
        self.add = add

    def forward(self, a, b):
        return self.add.add_cuda(a, b)
)";

}  // namespace

PromptTemplate PromptTemplate::builtin() {
    return {kBuiltinText, kBuiltinTorch, kBuiltinKernel};
}

}  // namespace kernelcur::sft
