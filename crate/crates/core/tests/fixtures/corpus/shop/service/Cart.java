package shop.service;

import java.util.List;
import shop.model.Product;

public class Cart {
    private List<Product> items;
    private int count;

    public Cart() {
        count = 0;
    }

    public void add(Product p) {
        items.add(p);
        count = count + 1;
    }

    public int size() {
        return count;
    }

    public int total(int discount) {
        int sum = 0;
        int i = 0;
        while (i < count) {
            Product p = items.get(i);
            sum = sum + p.value(discount);
            i = i + 1;
        }
        return sum;
    }
}
