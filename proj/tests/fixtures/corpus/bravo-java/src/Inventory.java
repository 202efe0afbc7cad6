package inventory;

import java.util.HashMap;
import java.util.Map;

/**
 * Keeps the stock level of every product in one warehouse.
 * See https://example.com/inventory for the data model.
 */
public class Inventory {
    private final Map<String, Integer> stock = new HashMap<>();

    /**
     * Adds units of a product to the current stock level.
     *
     * @param sku the product identifier
     * @param count number of units to add
     * @return the new stock level for the product
     * @throws IllegalArgumentException if count is negative
     */
    public int add(String sku, int count) {
        if (count < 0) {
            throw new IllegalArgumentException("negative count");
        }
        int current = stock.getOrDefault(sku, 0);
        // store the updated level back into the map
        stock.put(sku, current + count);
        return current + count;
    }

    /**
     * Write objects
     */
    public int level(String sku) {
        return stock.getOrDefault(sku, 0);
    }

    public void clear() {
        stock.clear();
    }
}
